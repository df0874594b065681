#include "tariffgrid/grid/network.hpp"

#include <cmath>
#include <deque>

#include "tariffgrid/errors.hpp"

namespace tariffgrid {

double reactive_for_pf(double p_kw, double power_factor) {
    const double phi = std::acos(power_factor);
    return p_kw * std::tan(phi);
}

} // namespace tariffgrid

namespace tariffgrid::grid {

int NetworkCase::bus_index(const std::string& id) const {
    for (size_t i = 0; i < buses.size(); ++i)
        if (buses[i].id == id) return static_cast<int>(i);
    throw Error(ErrorCode::UnknownBus, "no bus named '" + id + "'");
}

int NetworkCase::slack_index() const {
    int found = -1;
    for (size_t i = 0; i < buses.size(); ++i) {
        if (!buses[i].is_slack) continue;
        if (found >= 0) throw Error(ErrorCode::MultipleSlack, "more than one slack bus");
        found = static_cast<int>(i);
    }
    if (found < 0) throw Error(ErrorCode::NoSlack, "no slack bus");
    return found;
}

RadialLayout validate_radial(const NetworkCase& c) {
    const int nb = c.n_buses();
    const int nl = c.n_lines();
    const int slack = c.slack_index();

    if (nl > nb - 1) throw Error(ErrorCode::CycleDetected, "more lines than buses - 1");
    if (nl < nb - 1) throw Error(ErrorCode::DisconnectedBus, "fewer lines than buses - 1");

    RadialLayout lay;
    lay.parent_bus.assign(static_cast<size_t>(nb), -1);
    lay.parent_line.assign(static_cast<size_t>(nb), -1);
    lay.forward.assign(static_cast<size_t>(nl), true);
    lay.depth.assign(static_cast<size_t>(nb), -1);
    lay.incident_lines.assign(static_cast<size_t>(nb), {});

    for (int l = 0; l < nl; ++l) {
        const Line& line = c.lines[static_cast<size_t>(l)];
        lay.incident_lines[static_cast<size_t>(c.bus_index(line.from_bus))].push_back(l);
        lay.incident_lines[static_cast<size_t>(c.bus_index(line.to_bus))].push_back(l);
    }

    std::deque<int> queue{slack};
    lay.depth[static_cast<size_t>(slack)] = 0;
    lay.order.push_back(slack);
    while (!queue.empty()) {
        const int b = queue.front();
        queue.pop_front();
        for (int l : lay.incident_lines[static_cast<size_t>(b)]) {
            const Line& line = c.lines[static_cast<size_t>(l)];
            const int from = c.bus_index(line.from_bus);
            const int to = c.bus_index(line.to_bus);
            const int other = (from == b) ? to : from;
            if (other == lay.parent_bus[static_cast<size_t>(b)]) continue;
            if (lay.depth[static_cast<size_t>(other)] >= 0)
                throw Error(ErrorCode::CycleDetected,
                            "line " + line.id + " closes a loop at bus " +
                                c.buses[static_cast<size_t>(other)].id);
            lay.depth[static_cast<size_t>(other)] = lay.depth[static_cast<size_t>(b)] + 1;
            lay.parent_bus[static_cast<size_t>(other)] = b;
            lay.parent_line[static_cast<size_t>(other)] = l;
            lay.forward[static_cast<size_t>(l)] = (from == b);
            lay.order.push_back(other);
            queue.push_back(other);
        }
    }
    for (int b = 0; b < nb; ++b)
        if (lay.depth[static_cast<size_t>(b)] < 0)
            throw Error(ErrorCode::DisconnectedBus,
                        "bus " + c.buses[static_cast<size_t>(b)].id + " unreachable from slack");
    return lay;
}

} // namespace tariffgrid::grid
