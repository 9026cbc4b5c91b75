#include "erasure/cli_support.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace erasure {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

double parse_double(const std::string& token, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(token, &pos);
        if (pos != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw cli_usage_error(what + ": bad numeric token '" + token + "'");
    }
}

std::int64_t parse_int(const std::string& token, const std::string& what) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(token, &pos);
        if (pos != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw cli_usage_error(what + ": bad integer token '" + token + "'");
    }
}

}  // namespace

std::vector<double> Grid::values() const {
    std::vector<double> out;
    const auto count = static_cast<std::int64_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    out.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
        out.push_back(lo + static_cast<double>(i) * step);
    }
    return out;
}

Grid parse_grid(const std::string& spec) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3) {
        throw cli_usage_error("--grid: expected lo:hi:step, got '" + spec + "'");
    }
    Grid g{parse_double(parts[0], "--grid"), parse_double(parts[1], "--grid"),
           parse_double(parts[2], "--grid")};
    if (!(g.step > 0.0)) throw cli_usage_error("--grid: step must be > 0");
    if (g.hi < g.lo) throw cli_usage_error("--grid: need hi >= lo");
    return g;
}

Schedule parse_schedule_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw cli_usage_error("--schedule: expected kind:args, got '" + spec + "'");
    }
    const std::string kind = spec.substr(0, colon);
    const std::string args = spec.substr(colon + 1);
    if (kind == "geometric") {
        return make_geometric(parse_int(args, "--schedule geometric"));
    }
    if (kind == "arithmetic") {
        const auto parts = split(args, ',');
        if (parts.size() != 2) {
            throw cli_usage_error("--schedule arithmetic: expected T,M, got '" + args + "'");
        }
        return make_arithmetic(parse_int(parts[0], "--schedule arithmetic"),
                               parse_int(parts[1], "--schedule arithmetic"));
    }
    if (kind == "custom") {
        const auto parts = split(args, ',');
        std::vector<std::int64_t> blocks;
        blocks.reserve(parts.size());
        for (const auto& p : parts) {
            blocks.push_back(parse_int(p, "--schedule custom"));
        }
        return make_custom(std::move(blocks));
    }
    throw cli_usage_error("--schedule: unknown kind '" + kind + "'");
}

ErrorModel parse_error_model(const std::string& name) {
    if (name == "step") return ErrorModel::step;
    if (name == "ppv_upper") return ErrorModel::ppv_upper;
    if (name == "ppv_lower") return ErrorModel::ppv_lower;
    if (name == "ppv_mid") return ErrorModel::ppv_mid;
    throw cli_usage_error("--error-model: unknown model '" + name + "'");
}

std::string error_model_name(ErrorModel model) {
    switch (model) {
        case ErrorModel::step: return "step";
        case ErrorModel::ppv_upper: return "ppv_upper";
        case ErrorModel::ppv_lower: return "ppv_lower";
        case ErrorModel::ppv_mid: return "ppv_mid";
    }
    return "step";
}

std::string format_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string format_int(std::int64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
    return buf;
}

std::string CsvWriter::str() const {
    std::string out = header;
    out.push_back('\n');
    for (const auto& row : rows) {
        out += row;
        out.push_back('\n');
    }
    for (const auto& c : comments) {
        out += c;
        out.push_back('\n');
    }
    return out;
}

}  // namespace erasure
