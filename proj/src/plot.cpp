#include "orbitplan/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "orbitplan/experiment.hpp"
#include "orbitplan/orbit.hpp"

namespace orbitplan {

namespace {

constexpr double kPanel = 400.0;
constexpr double kMargin = 20.0;
constexpr double kHeader = 40.0;
constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

struct Projection {
    const char* label;
    double Vec3::*u;
    double Vec3::*v;
};

constexpr std::array<Projection, 3> kProjections = {{
    {"x-y", &Vec3::x, &Vec3::y},
    {"x-z", &Vec3::x, &Vec3::z},
    {"y-z", &Vec3::y, &Vec3::z},
}};

}  // namespace

TraceSet parse_trace_set(const std::string& which) {
    if (which == "initial") return TraceSet::Initial;
    if (which == "final") return TraceSet::Final;
    throw std::invalid_argument(fmt::format("--which must be 'initial' or 'final', got '{}'", which));
}

std::vector<Vec3> read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw PlotError(fmt::format("missing trace file {}", path.string()));
    std::string line;
    if (!std::getline(in, line) || line != "epoch_s,x_km,y_km,z_km") {
        throw PlotError(fmt::format("trace file {} has an unexpected header", path.string()));
    }
    std::vector<Vec3> points;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<double, 4> v{};
        std::stringstream ss(line);
        std::string cell;
        std::size_t n = 0;
        while (n < v.size() && std::getline(ss, cell, ',')) v[n++] = std::stod(cell);
        if (n != v.size()) throw PlotError(fmt::format("malformed row in {}: {}", path.string(), line));
        points.push_back({v[1], v[2], v[3]});
    }
    if (points.empty()) throw PlotError(fmt::format("trace file {} has no samples", path.string()));
    return points;
}

std::vector<NamedTrace> load_manifest_traces(const std::filesystem::path& manifest, TraceSet which) {
    std::ifstream in(manifest);
    if (!in) throw PlotError(fmt::format("cannot read manifest {}", manifest.string()));
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw PlotError(fmt::format("manifest {} is not valid JSON: {}", manifest.string(), e.what()));
    }
    const auto runs = doc.find("runs");
    if (runs == doc.end() || !runs->is_array() || runs->empty()) {
        throw PlotError(fmt::format("manifest {} lists no runs", manifest.string()));
    }
    const char* key = which == TraceSet::Initial ? "initial_trace" : "final_trace";
    const auto dir = manifest.parent_path();
    std::vector<NamedTrace> traces;
    for (const auto& run : *runs) {
        try {
            const auto name = run.at("name").get<std::string>();
            const auto file = run.at("files").at(key).get<std::string>();
            traces.push_back({name, read_trace_csv(dir / file)});
        } catch (const nlohmann::json::exception& e) {
            throw PlotError(fmt::format("manifest run entry is incomplete: {}", e.what()));
        }
    }
    return traces;
}

std::string render_svg(const std::vector<NamedTrace>& traces, const std::string& title,
                       double body_radius_km) {
    double extent = body_radius_km;
    for (const auto& t : traces) {
        for (const auto& p : t.points) {
            extent = std::max({extent, std::abs(p.x), std::abs(p.y), std::abs(p.z)});
        }
    }
    extent *= 1.05;
    const double scale = (kPanel / 2.0) / extent;
    const double width = 3.0 * kPanel + 4.0 * kMargin;
    const double height = kPanel + 2.0 * kMargin + kHeader + 20.0 * static_cast<double>(traces.size());

    std::string out;
    out += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
        "viewBox=\"0 0 {:.0f} {:.0f}\">\n",
        width, height, width, height);
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += fmt::format(
        "<text x=\"{:.0f}\" y=\"26\" font-family=\"sans-serif\" font-size=\"18\">{}</text>\n", kMargin,
        title);

    for (std::size_t p = 0; p < kProjections.size(); ++p) {
        const auto& proj = kProjections[p];
        const double x0 = kMargin + static_cast<double>(p) * (kPanel + kMargin);
        const double y0 = kHeader;
        const double cx = x0 + kPanel / 2.0;
        const double cy = y0 + kPanel / 2.0;
        out += fmt::format("<g id=\"panel-{}\">\n", proj.label);
        out += fmt::format(
            "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" "
            "stroke=\"#888\"/>\n",
            x0, y0, kPanel, kPanel);
        out += fmt::format(
            "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n",
            x0 + 6.0, y0 + 18.0, proj.label);
        out += fmt::format(
            "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\" fill=\"#cfe3f5\" stroke=\"#5b8db8\"/>\n", cx,
            cy, body_radius_km * scale);
        for (std::size_t t = 0; t < traces.size(); ++t) {
            out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"",
                               kPalette[t % kPalette.size()]);
            for (std::size_t k = 0; k < traces[t].points.size(); ++k) {
                const auto& pt = traces[t].points[k];
                // SVG y grows downwards.
                out += fmt::format("{}{:.2f},{:.2f}", k == 0 ? "" : " ", cx + pt.*proj.u * scale,
                                   cy - pt.*proj.v * scale);
            }
            out += "\"/>\n";
        }
        out += "</g>\n";
    }

    for (std::size_t t = 0; t < traces.size(); ++t) {
        const double y = kHeader + kPanel + kMargin + 20.0 * static_cast<double>(t);
        out += fmt::format(
            "<line x1=\"{:.0f}\" y1=\"{:.0f}\" x2=\"{:.0f}\" y2=\"{:.0f}\" stroke=\"{}\" "
            "stroke-width=\"3\"/>\n",
            kMargin, y, kMargin + 30.0, y, kPalette[t % kPalette.size()]);
        out += fmt::format(
            "<text x=\"{:.0f}\" y=\"{:.0f}\" font-family=\"sans-serif\" font-size=\"13\">{}</text>\n",
            kMargin + 38.0, y + 4.0, traces[t].name);
    }
    out += "</svg>\n";
    return out;
}

void export_plot(const std::filesystem::path& manifest, TraceSet which,
                 const std::filesystem::path& output) {
    const auto traces = load_manifest_traces(manifest, which);
    const std::string title = which == TraceSet::Initial ? "Initial orbits" : "Final orbits";
    write_file_atomic(output, render_svg(traces, title, kEarthRadius));
}

}  // namespace orbitplan
