#include "plqr/serialize.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace plqr {

namespace {

using nlohmann::json;

void append_full_precision(std::string& out, double value) {
    char buf[32];
    const int len = std::snprintf(buf, sizeof(buf), "%.17g", value);
    out.append(buf, static_cast<size_t>(len));
}

double parse_double(const std::string& token, int line_no) {
    double value = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw IoError("trajectory CSV: malformed number '" + token + "' on line " +
                      std::to_string(line_no));
    }
    return value;
}

}  // namespace

json matrix_to_json(const Eigen::MatrixXd& m) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) arr.push_back(m(i, j));
    }
    return arr;
}

Eigen::MatrixXd matrix_from_json(const json& node, Eigen::Index rows, Eigen::Index cols,
                                 const std::string& what) {
    if (!node.is_array() || static_cast<Eigen::Index>(node.size()) != rows * cols) {
        throw ValidationError(what + ": expected " + std::to_string(rows * cols) +
                              " row-major entries");
    }
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = node[static_cast<size_t>(i * cols + j)].get<double>();
        }
    }
    return m;
}

json schedule_to_json(const GainSchedule& schedule) {
    schedule.validate();
    const Eigen::Index n = schedule.riccati.front().rows();
    const Eigen::Index m = schedule.gains.front().rows();
    json doc;
    doc["format"] = "plqr-gain-schedule";
    doc["version"] = 1;
    doc["p"] = schedule.p;
    doc["ts"] = schedule.ts;
    doc["states"] = n;
    doc["inputs"] = m;
    doc["x_bar"] = matrix_to_json(schedule.x_bar);
    json riccati = json::array();
    for (const auto& pk : schedule.riccati) riccati.push_back(matrix_to_json(pk));
    doc["riccati"] = riccati;
    json gains = json::array();
    for (const auto& kk : schedule.gains) gains.push_back(matrix_to_json(kk));
    doc["gains"] = gains;
    return doc;
}

GainSchedule schedule_from_json(const json& doc) {
    if (doc.value("format", std::string()) != "plqr-gain-schedule") {
        throw ValidationError("schedule file: unrecognized format tag");
    }
    GainSchedule schedule;
    schedule.p = doc.at("p").get<int>();
    schedule.ts = doc.at("ts").get<double>();
    const auto n = doc.at("states").get<Eigen::Index>();
    const auto m = doc.at("inputs").get<Eigen::Index>();
    schedule.x_bar = matrix_from_json(doc.at("x_bar"), n, 1, "schedule x_bar");
    const json& riccati = doc.at("riccati");
    const json& gains = doc.at("gains");
    if (static_cast<int>(riccati.size()) != schedule.p ||
        static_cast<int>(gains.size()) != schedule.p) {
        throw ValidationError("schedule file: matrix counts do not match p");
    }
    for (const auto& node : riccati) {
        schedule.riccati.push_back(matrix_from_json(node, n, n, "schedule P_k"));
    }
    for (const auto& node : gains) {
        schedule.gains.push_back(matrix_from_json(node, m, n, "schedule K_k"));
    }
    schedule.validate();
    return schedule;
}

json plant_to_json(const PeriodicPlant& plant) {
    plant.validate();
    json doc;
    doc["format"] = "plqr-periodic-plant";
    doc["version"] = 1;
    doc["states"] = kNumStates;
    doc["inputs"] = kNumInputs;
    doc["p"] = plant.p;
    doc["ts"] = plant.ts;
    doc["a"] = matrix_to_json(plant.a);
    json b_list = json::array();
    for (const auto& bk : plant.b) b_list.push_back(matrix_to_json(bk));
    doc["b"] = b_list;
    doc["q"] = matrix_to_json(plant.q);
    doc["r"] = matrix_to_json(plant.r);
    return doc;
}

PeriodicPlant plant_from_json(const json& doc) {
    if (doc.value("format", std::string()) != "plqr-periodic-plant") {
        throw ValidationError("plant file: unrecognized format tag");
    }
    PeriodicPlant plant;
    plant.p = doc.at("p").get<int>();
    plant.ts = doc.at("ts").get<double>();
    plant.a = matrix_from_json(doc.at("a"), kNumStates, kNumStates, "plant A");
    const json& b_list = doc.at("b");
    if (static_cast<int>(b_list.size()) != plant.p) {
        throw ValidationError("plant file: B count does not match p");
    }
    for (const auto& node : b_list) {
        plant.b.push_back(matrix_from_json(node, kNumStates, kNumInputs, "plant B_k"));
    }
    plant.q = matrix_from_json(doc.at("q"), kNumStates, kNumStates, "plant Q");
    plant.r = matrix_from_json(doc.at("r"), kNumInputs, kNumInputs, "plant R");
    plant.validate();
    return plant;
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
    std::ofstream stream(path);
    if (!stream) throw IoError("cannot open '" + path.string() + "' for writing");
    stream << doc.dump(1, '\t') << '\n';
    if (!stream) throw IoError("failed writing '" + path.string() + "'");
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream stream(path);
    if (!stream) throw IoError("cannot open '" + path.string() + "'");
    try {
        json doc;
        stream >> doc;
        return doc;
    } catch (const json::parse_error& err) {
        throw IoError("'" + path.string() + "' is not valid JSON: " + err.what());
    }
}

std::string trajectory_to_csv(const Trajectory& trajectory) {
    std::string out(kTrajectoryCsvHeader);
    out.push_back('\n');
    for (const auto& row : trajectory.samples) {
        const double values[19] = {row.t,
                                   row.omega(0),         row.omega(1),         row.omega(2),
                                   row.wheel_speed(0),   row.wheel_speed(1),   row.wheel_speed(2),
                                   row.q(0),             row.q(1),             row.q(2),
                                   row.wheel_torque(0),  row.wheel_torque(1),  row.wheel_torque(2),
                                   row.dipole_moment(0), row.dipole_moment(1), row.dipole_moment(2),
                                   row.field(0),         row.field(1),         row.field(2)};
        for (int i = 0; i < 19; ++i) {
            if (i > 0) out.push_back(',');
            append_full_precision(out, values[i]);
        }
        out.push_back('\n');
    }
    return out;
}

Trajectory trajectory_from_csv(const std::string& text) {
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;

    if (!std::getline(stream, line)) throw IoError("trajectory CSV: empty input");
    ++line_no;
    if (line != kTrajectoryCsvHeader) {
        throw IoError("trajectory CSV: unexpected header on line 1");
    }

    Trajectory traj;
    double prev_t = 0.0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::array<double, 19> values{};
        size_t pos = 0;
        for (int col = 0; col < 19; ++col) {
            const size_t next = line.find(',', pos);
            const bool last = (col == 18);
            if (last != (next == std::string::npos)) {
                throw IoError("trajectory CSV: expected 19 columns on line " +
                              std::to_string(line_no));
            }
            values[static_cast<size_t>(col)] =
                parse_double(line.substr(pos, last ? std::string::npos : next - pos), line_no);
            pos = next + 1;
        }
        TrajectorySample row;
        row.t = values[0];
        row.omega = Vector3d(values[1], values[2], values[3]);
        row.wheel_speed = Vector3d(values[4], values[5], values[6]);
        row.q = Vector3d(values[7], values[8], values[9]);
        row.wheel_torque = Vector3d(values[10], values[11], values[12]);
        row.dipole_moment = Vector3d(values[13], values[14], values[15]);
        row.field = Vector3d(values[16], values[17], values[18]);
        if (!traj.samples.empty() && !(row.t > prev_t)) {
            throw IoError("trajectory CSV: non-increasing time on line " +
                          std::to_string(line_no));
        }
        prev_t = row.t;
        traj.samples.push_back(row);
    }
    return traj;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory) {
    std::ofstream stream(path);
    if (!stream) throw IoError("cannot open '" + path.string() + "' for writing");
    stream << trajectory_to_csv(trajectory);
    if (!stream) throw IoError("failed writing '" + path.string() + "'");
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream stream(path);
    if (!stream) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << stream.rdbuf();
    return trajectory_from_csv(buffer.str());
}

}  // namespace plqr
