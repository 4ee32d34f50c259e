#include "qcsm/model_io.h"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "qcsm/pauli.h"

namespace qcsm {

namespace {

char member_flavor(const Member &m) {
    // Error flavor is the Pauli anticommuting with the test operator.
    return m.test == 2 ? 'X' : (m.test == 1 ? 'Z' : 'Y');
}

}  // namespace

std::string model_to_text(const SpinModel &model) {
    std::ostringstream out;
    out.precision(17);
    out << "# qcsm spin model v1\n";
    out << "spins " << model.num_spins << "\n";
    out << "interactions " << model.interactions.size() << "\n";
    out << "css " << (model.has_css_split ? 1 : 0) << "\n";
    out << "log_norm " << model.log_norm << "\n";
    out << "log_offset " << model.log_offset << "\n";
    for (size_t c = 0; c < model.interactions.size(); c++) {
        const auto &ia = model.interactions[c];
        out << "I";
        if (std::isinf(ia.coupling)) {
            out << (ia.coupling > 0 ? " inf" : " -inf");
        } else {
            out << ' ' << ia.coupling;
        }
        out << ' ' << ia.wx << ' ' << ia.wz << " |";
        for (int k : ia.spins) {
            out << ' ' << k;
        }
        out << " |";
        for (const auto &m : ia.members) {
            out << ' ' << member_flavor(m) << ' ' << m.qubit << '@' << tau_to_string(m.layer);
        }
        out << "\n";
    }
    return out.str();
}

std::string model_to_graph_json(const SpinModel &model) {
    nlohmann::json j;
    j["vertices"] = model.num_spins;
    nlohmann::json edges = nlohmann::json::array();
    for (const auto &ia : model.interactions) {
        nlohmann::json e;
        e["spins"] = ia.spins;
        e["weight"] = ia.wx + ia.wz;
        e["wx"] = ia.wx;
        e["wz"] = ia.wz;
        if (std::isinf(ia.coupling)) {
            e["coupling"] = ia.coupling > 0 ? "inf" : "-inf";
        } else {
            e["coupling"] = ia.coupling;
        }
        edges.push_back(e);
    }
    j["hyperedges"] = edges;
    return j.dump(2);
}

std::string realization_to_text(const DisorderRealization &r) {
    std::ostringstream out;
    out << "# qcsm disorder realization\n";
    out << "seed " << r.seed << "\n";
    out << "index " << r.index << "\n";
    out << "source " << (r.from_sampled_error ? "sampled_error" : "direct_component") << "\n";
    out << "eta";
    for (int8_t e : r.eta) {
        out << (e > 0 ? " +1" : " -1");
    }
    out << "\n";
    return out.str();
}

}  // namespace qcsm
