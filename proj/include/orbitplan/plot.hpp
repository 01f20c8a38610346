#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "orbitplan/vec3.hpp"

namespace orbitplan {

class PlotError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class TraceSet { Initial, Final };

TraceSet parse_trace_set(const std::string& which);

struct NamedTrace {
    std::string name;
    std::vector<Vec3> points;  // km
};

// Reads epoch_s,x_km,y_km,z_km rows.
std::vector<Vec3> read_trace_csv(const std::filesystem::path& path);

// Traces referenced by a manifest, resolved relative to its directory.
// Throws PlotError when the manifest lists no runs or a trace is missing.
std::vector<NamedTrace> load_manifest_traces(const std::filesystem::path& manifest, TraceSet which);

// Three orthographic panels (xy, xz, yz) sharing one scale, one polyline per
// orbit and the central body drawn to scale. Output is a pure function of
// the input.
std::string render_svg(const std::vector<NamedTrace>& traces, const std::string& title,
                       double body_radius_km);

void export_plot(const std::filesystem::path& manifest, TraceSet which,
                 const std::filesystem::path& output);

}  // namespace orbitplan
