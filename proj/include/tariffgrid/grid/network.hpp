#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "tariffgrid/units.hpp"

namespace tariffgrid::grid {

struct Bus {
    std::string id;
    double vmin_pu = 0.9;
    double vmax_pu = 1.1;
    bool is_slack = false;
};

struct Line {
    std::string id;
    std::string from_bus;
    std::string to_bus;
    double r_ohm = 0.0;
    double x_ohm = 0.0;
    double imax_a = 400.0;
    double smax_kva = 92.0;
};

// Radial LV network: buses, lines, one slack bus holding the reference
// voltage, and the per-unit bases everything is converted through.
struct NetworkCase {
    std::vector<Bus> buses;
    std::vector<Line> lines;
    PuBase base;
    double slack_v_pu = 1.0;

    int bus_index(const std::string& id) const;
    int slack_index() const;
    int n_buses() const { return static_cast<int>(buses.size()); }
    int n_lines() const { return static_cast<int>(lines.size()); }
};

// Parent-child orientation of the validated tree, rooted at the slack bus.
// forward means the line's stored from->to already points parent->child.
struct RadialLayout {
    std::vector<int> parent_bus;   // per bus, -1 at slack
    std::vector<int> parent_line;  // per bus, -1 at slack
    std::vector<bool> forward;     // per line
    std::vector<int> depth;        // per bus
    std::vector<int> order;        // bus indices, parents before children
    std::vector<std::vector<int>> incident_lines;  // per bus

    int parent_of_line(const NetworkCase& c, int l) const {
        return c.bus_index(forward[static_cast<size_t>(l)] ? c.lines[static_cast<size_t>(l)].from_bus
                                                           : c.lines[static_cast<size_t>(l)].to_bus);
    }
    int child_of_line(const NetworkCase& c, int l) const {
        return c.bus_index(forward[static_cast<size_t>(l)] ? c.lines[static_cast<size_t>(l)].to_bus
                                                           : c.lines[static_cast<size_t>(l)].from_bus);
    }
};

// Checks the line graph is a spanning tree rooted at the unique slack bus and
// records the orientation used by the branch-flow constraints. Throws
// Error({NoSlack, MultipleSlack, CycleDetected, DisconnectedBus, UnknownBus}).
RadialLayout validate_radial(const NetworkCase& c);

} // namespace tariffgrid::grid
