#include "sparsid/io.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "sparsid/error.hpp"

namespace sparsid {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& cell, std::size_t line, const char* what) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (cell.empty() || res.ec != std::errc() || res.ptr != last)
        throw ParseError(std::string(what) + ": line " + std::to_string(line) + ": '" + cell + "' is not a number");
    return v;
}

long parse_integer(const std::string& cell, std::size_t line, const char* what) {
    long v = 0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size())
        throw ParseError(std::string(what) + ": line " + std::to_string(line) + ": '" + cell + "' is not an integer");
    return v;
}

// Non-empty lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string>> lines_of(const std::string& text) {
    std::vector<std::pair<std::size_t, std::string>> out;
    std::istringstream in(text);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        out.emplace_back(n, line);
    }
    return out;
}

void expect_header(const std::vector<std::string>& got, const std::vector<std::string>& want, const char* what) {
    if (got != want) {
        std::string w;
        for (const auto& s : want) w += (w.empty() ? "" : ",") + s;
        throw ParseError(std::string(what) + ": expected header '" + w + "'");
    }
}

}  // namespace

std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

nlohmann::json read_json(const fs::path& path) {
    try {
        return nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("'" + path.string() + "': " + e.what());
    }
}

void write_json(const fs::path& path, const nlohmann::json& doc) { write_text(path, doc.dump(2) + "\n"); }

// ---------------------------------------------------------------------------

TimeSeries parse_timeseries_csv(const std::string& text) {
    const auto lines = lines_of(text);
    if (lines.empty()) throw ParseError("time series: empty file");
    const auto header = split(lines[0].second);
    if (header.size() < 2 || header[0] != "t") throw ParseError("time series: header must be 't,<channels>'");
    const std::size_t m = header.size() - 1;
    if (lines.size() < 2) throw ParseError("time series: no samples");
    TimeSeries s;
    s.channel_names.assign(header.begin() + 1, header.end());
    s.times.resize(static_cast<Eigen::Index>(lines.size() - 1));
    s.values.resize(static_cast<Eigen::Index>(lines.size() - 1), static_cast<Eigen::Index>(m));
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto cells = split(lines[r].second);
        if (cells.size() != m + 1)
            throw ParseError("time series: line " + std::to_string(lines[r].first) + ": expected " +
                             std::to_string(m + 1) + " fields, got " + std::to_string(cells.size()));
        const auto row = static_cast<Eigen::Index>(r - 1);
        s.times[row] = parse_number(cells[0], lines[r].first, "time series");
        for (std::size_t c = 0; c < m; ++c)
            s.values(row, static_cast<Eigen::Index>(c)) = parse_number(cells[c + 1], lines[r].first, "time series");
    }
    s.dt = TimeSeries::detect_step(s.times);
    try {
        s.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("time series: ") + e.what());
    }
    return s;
}

TimeSeries read_timeseries_csv(const fs::path& path) { return parse_timeseries_csv(read_text(path)); }

std::string format_timeseries_csv(const TimeSeries& s) {
    std::string out = "t";
    const auto names = s.channel_names.empty() ? default_channel_names(s.channels()) : s.channel_names;
    for (const auto& n : names) out += "," + n;
    out += "\n";
    for (Eigen::Index r = 0; r < s.samples(); ++r) {
        out += format_double(s.times[r]);
        for (Eigen::Index c = 0; c < s.channels(); ++c) out += "," + format_double(s.values(r, c));
        out += "\n";
    }
    return out;
}

void write_timeseries_csv(const fs::path& path, const TimeSeries& s) { write_text(path, format_timeseries_csv(s)); }

// ---------------------------------------------------------------------------

GameRecord parse_game_csv(const std::string& text) {
    const auto lines = lines_of(text);
    if (lines.empty()) throw ParseError("game record: empty file");
    expect_header(split(lines[0].second), {"round", "agent", "strategy", "payoff"}, "game record");
    std::map<std::pair<long, long>, std::pair<Strategy, double>> cells;
    long rounds = 0, agents = 0;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto c = split(lines[r].second);
        const auto ln = lines[r].first;
        if (c.size() != 4) throw ParseError("game record: line " + std::to_string(ln) + ": expected 4 fields");
        const long round = parse_integer(c[0], ln, "game record");
        const long agent = parse_integer(c[1], ln, "game record");
        if (round < 0 || agent < 0) throw ParseError("game record: line " + std::to_string(ln) + ": negative index");
        if (c[2].size() != 1) throw ParseError("game record: line " + std::to_string(ln) + ": strategy must be C or D");
        Strategy s;
        try {
            s = strategy_from_char(c[2][0]);
        } catch (const Error&) {
            throw ParseError("game record: line " + std::to_string(ln) + ": strategy must be C or D");
        }
        if (!cells.emplace(std::pair{round, agent}, std::pair{s, parse_number(c[3], ln, "game record")}).second)
            throw ParseError("game record: line " + std::to_string(ln) + ": duplicate (round, agent)");
        rounds = std::max(rounds, round + 1);
        agents = std::max(agents, agent + 1);
    }
    if (cells.empty()) throw ParseError("game record: no rows");
    if (static_cast<long>(cells.size()) != rounds * agents)
        throw ParseError("game record: every agent needs one row per round");
    GameRecord rec;
    rec.agents = static_cast<int>(agents);
    rec.payoffs.resize(rounds, agents);
    rec.strategies.resize(static_cast<std::size_t>(rounds * agents));
    for (const auto& [key, val] : cells) {
        rec.strategies[static_cast<std::size_t>(key.first * agents + key.second)] = val.first;
        rec.payoffs(key.first, key.second) = val.second;
    }
    return rec;
}

GameRecord read_game_csv(const fs::path& path) { return parse_game_csv(read_text(path)); }

void write_game_csv(const fs::path& path, const GameRecord& rec) {
    std::string out = "round,agent,strategy,payoff\n";
    for (Eigen::Index t = 0; t < rec.rounds(); ++t)
        for (int i = 0; i < rec.agents; ++i)
            out += std::to_string(t) + "," + std::to_string(i) + "," + to_char(rec.strategy(t, i)) + "," +
                   format_double(rec.payoffs(t, i)) + "\n";
    write_text(path, out);
}

// ---------------------------------------------------------------------------

std::vector<WeightedEdge> read_edge_list_csv(const fs::path& path) {
    const auto lines = lines_of(read_text(path));
    if (lines.empty()) throw ParseError("edge list: empty file");
    expect_header(split(lines[0].second), {"i", "j", "weight"}, "edge list");
    std::vector<WeightedEdge> out;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto c = split(lines[r].second);
        const auto ln = lines[r].first;
        if (c.size() != 3) throw ParseError("edge list: line " + std::to_string(ln) + ": expected 3 fields");
        out.push_back({static_cast<int>(parse_integer(c[0], ln, "edge list")),
                       static_cast<int>(parse_integer(c[1], ln, "edge list")), parse_number(c[2], ln, "edge list")});
    }
    return out;
}

void write_edge_list_csv(const fs::path& path, const std::vector<WeightedEdge>& edges) {
    std::string out = "i,j,weight\n";
    for (const auto& e : edges)
        out += std::to_string(e.i) + "," + std::to_string(e.j) + "," + format_double(e.weight) + "\n";
    write_text(path, out);
}

std::vector<WeightedEdge> edge_list(const NetworkEstimate& est) {
    std::vector<WeightedEdge> out;
    for (auto [i, j] : est.edges()) out.push_back({i, j, est.weight(i, j)});
    return out;
}

std::vector<WeightedEdge> edge_list(const SocialNetwork& net) {
    std::vector<WeightedEdge> out;
    const auto n = net.adjacency.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!net.adjacency[i][j] && !net.adjacency[j][i]) continue;
            double w = 0.0;
            if (i < net.rows.size()) w = std::max(w, net.rows[i].weights[static_cast<Eigen::Index>(j)]);
            if (j < net.rows.size()) w = std::max(w, net.rows[j].weights[static_cast<Eigen::Index>(i)]);
            out.push_back({static_cast<int>(i), static_cast<int>(j), w});
        }
    return out;
}

// ---------------------------------------------------------------------------

FieldData read_field_csv(const fs::path& path) {
    const auto lines = lines_of(read_text(path));
    if (lines.empty()) throw ParseError("field: empty file");
    expect_header(split(lines[0].second), {"t", "x", "u"}, "field");
    std::vector<double> ts, xs;
    std::vector<std::array<double, 3>> rows;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto c = split(lines[r].second);
        const auto ln = lines[r].first;
        if (c.size() != 3) throw ParseError("field: line " + std::to_string(ln) + ": expected 3 fields");
        rows.push_back({parse_number(c[0], ln, "field"), parse_number(c[1], ln, "field"), parse_number(c[2], ln, "field")});
    }
    if (rows.empty()) throw ParseError("field: no rows");
    for (const auto& r : rows) {
        if (ts.empty() || r[0] != ts.back()) ts.push_back(r[0]);
        if (ts.size() == 1) xs.push_back(r[1]);
    }
    if (rows.size() != ts.size() * xs.size()) throw ParseError("field: rows do not form a full time-space lattice");
    FieldData f;
    f.t = Eigen::Map<Eigen::VectorXd>(ts.data(), static_cast<Eigen::Index>(ts.size()));
    f.x = Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    f.u.resize(f.t.size(), f.x.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto ti = static_cast<Eigen::Index>(k / xs.size()), xi = static_cast<Eigen::Index>(k % xs.size());
        if (rows[k][0] != f.t[ti] || rows[k][1] != f.x[xi])
            throw ParseError("field: rows must be ordered by time, then by the same space grid");
        f.u(ti, xi) = rows[k][2];
    }
    f.dx = f.x.size() > 1 ? f.x[1] - f.x[0] : 0.0;
    f.dt = f.t.size() > 1 ? f.t[1] - f.t[0] : 0.0;
    f.periodic = false;
    try {
        f.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("field: ") + e.what());
    }
    return f;
}

void write_field_csv(const fs::path& path, const FieldData& f) {
    std::string out = "t,x,u\n";
    for (Eigen::Index i = 0; i < f.u.rows(); ++i)
        for (Eigen::Index j = 0; j < f.u.cols(); ++j)
            out += format_double(f.t[i]) + "," + format_double(f.x[j]) + "," + format_double(f.u(i, j)) + "\n";
    write_text(path, out);
}

void write_field_binary(const fs::path& path, const FieldData& f) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    for (Eigen::Index i = 0; i < f.u.rows(); ++i)
        for (Eigen::Index j = 0; j < f.u.cols(); ++j) {
            const double v = f.u(i, j);
            out.write(reinterpret_cast<const char*>(&v), sizeof v);
        }
    nlohmann::json side{{"rows", f.u.rows()}, {"cols", f.u.cols()}, {"dx", f.dx},          {"dt", f.dt},
                        {"x0", f.x[0]},       {"t0", f.t[0]},       {"periodic", f.periodic}, {"layout", "row=time"}};
    write_json(fs::path(path.string() + ".json"), side);
}

FieldData read_field_binary(const fs::path& path) {
    const auto side = read_json(fs::path(path.string() + ".json"));
    try {
        const auto rows = side.at("rows").get<Eigen::Index>(), cols = side.at("cols").get<Eigen::Index>();
        const std::string raw = read_text(path);
        if (rows < 1 || cols < 1 || raw.size() != static_cast<std::size_t>(rows * cols) * sizeof(double))
            throw ParseError("field lattice: size does not match the sidecar");
        FieldData f;
        f.dx = side.at("dx");
        f.dt = side.at("dt");
        f.periodic = side.value("periodic", false);
        f.x = Eigen::VectorXd::LinSpaced(cols, 0.0, static_cast<double>(cols - 1)) * f.dx +
              Eigen::VectorXd::Constant(cols, side.at("x0").get<double>());
        f.t = Eigen::VectorXd::LinSpaced(rows, 0.0, static_cast<double>(rows - 1)) * f.dt +
              Eigen::VectorXd::Constant(rows, side.at("t0").get<double>());
        f.u.resize(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j)
                std::memcpy(&f.u(i, j), raw.data() + static_cast<std::size_t>(i * cols + j) * sizeof(double),
                            sizeof(double));
        f.validate();
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("field sidecar: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("field lattice: ") + e.what());
    }
}

}  // namespace sparsid
