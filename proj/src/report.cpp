#include "gwt/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gwt/errors.hpp"

namespace gwt {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void config_comment(std::ostringstream& os, const nlohmann::json& config) {
    os << "# config " << config.dump() << "\n";
}

nlohmann::json tv_row(const TVReport& r) {
    nlohmann::json top = nlohmann::json::array();
    for (const TVEntry& e : r.top)
        top.push_back({{"tree", e.tree.to_parens()},
                       {"conditioned", e.conditioned},
                       {"kesten", e.kesten}});
    return {{"h", r.h},
            {"event", r.event},
            {"tv", r.tv},
            {"method", r.method},
            {"samples", r.samples},
            {"stderr", r.std_error},
            {"unobserved_kesten", r.unobserved_kesten},
            {"deficit", r.deficit},
            {"top", top}};
}

}  // namespace

std::string ratio_csv(const RatioReport& r, const nlohmann::json& config) {
    std::ostringstream os;
    config_comment(os, config);
    os << "# family " << r.family << "\n";
    os << "n,ratio,target\n";
    for (const RatioPoint& pt : r.points)
        os << pt.n << "," << fmt(pt.ratio) << "," << fmt(r.target) << "\n";
    return os.str();
}

nlohmann::json ratio_json(const RatioReport& r, const nlohmann::json& config) {
    nlohmann::json points = nlohmann::json::array();
    for (const RatioPoint& pt : r.points) points.push_back({{"n", pt.n}, {"ratio", pt.ratio}});
    return {{"config", config},
            {"family", r.family},
            {"target", r.target},
            {"tolerance", r.tolerance},
            {"final_distance", r.final_distance},
            {"converged", r.converged},
            {"points", points}};
}

std::string tv_csv(const std::vector<TVReport>& rows, const nlohmann::json& config) {
    std::ostringstream os;
    config_comment(os, config);
    os << "event,h,tv,method,samples,stderr,unobserved_kesten,deficit\n";
    for (const TVReport& r : rows)
        os << r.event << "," << r.h << "," << fmt(r.tv) << "," << r.method << "," << r.samples
           << "," << fmt(r.std_error) << "," << fmt(r.unobserved_kesten) << ","
           << fmt(r.deficit) << "\n";
    return os.str();
}

nlohmann::json tv_json(const std::vector<TVReport>& rows, const nlohmann::json& config) {
    nlohmann::json arr = nlohmann::json::array();
    for (const TVReport& r : rows) arr.push_back(tv_row(r));
    return {{"config", config}, {"reports", arr}};
}

std::string tilt_csv(const TiltCheckReport& r, const nlohmann::json& config) {
    std::ostringstream os;
    config_comment(os, config);
    os << "theta,discrepancy,slice_size\n";
    for (const TiltCheckRow& row : r.rows)
        os << fmt(row.theta) << "," << fmt(row.discrepancy) << "," << row.slice_size << "\n";
    return os.str();
}

nlohmann::json tilt_json(const TiltCheckReport& r, const nlohmann::json& config) {
    nlohmann::json rows = nlohmann::json::array();
    for (const TiltCheckRow& row : r.rows)
        rows.push_back({{"theta", row.theta},
                        {"discrepancy", row.discrepancy},
                        {"slice_size", row.slice_size}});
    return {{"config", config}, {"rows", rows}, {"max_discrepancy", r.max_discrepancy}};
}

std::string pmf_csv(const PMFVector& pmf, const nlohmann::json& config) {
    std::ostringstream os;
    config_comment(os, config);
    os << pmf.to_csv();
    return os.str();
}

nlohmann::json pmf_json(const PMFVector& pmf, const nlohmann::json& config) {
    nlohmann::json values = nlohmann::json::array();
    for (double v : pmf.values) values.push_back(v);
    return {{"config", config},
            {"offset", pmf.offset},
            {"values", values},
            {"deficit", pmf.deficit()}};
}

void write_file(const std::string& path, const std::string& text) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw Error("short write to " + path);
}

}  // namespace gwt
