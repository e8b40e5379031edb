#include "tsvf/io.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "tsvf/numerics.hpp"

namespace tsvf {

std::string format_double(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void dump_into(std::ostringstream& os, const nlohmann::json& j, int indent, int depth) {
    const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << '{' << nl;
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ',' << nl;
                first = false;
                os << pad << nlohmann::json(it.key()).dump() << (indent > 0 ? ": " : ":");
                dump_into(os, it.value(), indent, depth + 1);
            }
            os << nl << close_pad << '}';
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            os << '[' << nl;
            bool first = true;
            for (const auto& v : j) {
                if (!first) os << ',' << nl;
                first = false;
                os << pad;
                dump_into(os, v, indent, depth + 1);
            }
            os << nl << close_pad << ']';
            return;
        }
        case nlohmann::json::value_t::number_float: {
            const double v = j.get<double>();
            os << (std::isfinite(v) ? format_double(v) : "null");
            return;
        }
        default:
            os << j.dump();
    }
}

}  // namespace

std::string dump_json(const nlohmann::json& j, int indent) {
    std::ostringstream os;
    dump_into(os, j, indent, 0);
    os << '\n';
    return os.str();
}

std::string to_csv(const Series& s) {
    std::string out;
    for (std::size_t c = 0; c < s.columns.size(); ++c) {
        if (c) out += ',';
        out += s.columns[c];
    }
    out += '\n';
    for (const auto& row : s.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    return out;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    static std::atomic<unsigned long> counter{0};
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::resource, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
    std::ostringstream tag;
    tag << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << '.' << counter++;
    const std::filesystem::path tmp = path.string() + tag.str();
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorCode::resource, "cannot open " + tmp.string() + " for writing");
        f << content;
        f.flush();
        if (!f) throw Error(ErrorCode::resource, "write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error(ErrorCode::resource, "cannot rename into " + path.string() + ": " + ec.message());
    }
}

}  // namespace tsvf
