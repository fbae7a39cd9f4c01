#include "dseq/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace dseq::report {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

bool is_scalar(const Json& j) { return !j.is_object() && !j.is_array(); }

void write(const Json& j, std::string& out, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
    switch (j.type()) {
    case Json::value_t::number_float: {
        const double v = j.get<double>();
        out += std::isfinite(v) ? format_double(v) : "null";
        return;
    }
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (const auto& [key, value] : j.items()) {
            if (!first) out += ",\n";
            first = false;
            out += pad + Json(key).dump() + ": ";
            write(value, out, depth + 1);
        }
        out += "\n" + close_pad + "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) {
            return is_scalar(e) || (e.is_array() && std::all_of(e.begin(), e.end(), is_scalar));
        });
        out += flat ? "[" : "[\n";
        bool first = true;
        for (const auto& e : j) {
            if (!first) out += flat ? ", " : ",\n";
            first = false;
            if (!flat) out += pad;
            write(e, out, flat ? depth : depth + 1);
        }
        out += flat ? "]" : "\n" + close_pad + "]";
        return;
    }
    default: out += j.dump(); return;
    }
}

} // namespace

std::string dump(const Json& j) {
    std::string out;
    write(j, out, 0);
    out += "\n";
    return out;
}

Json to_json(IndexPair p) { return Json::array({p.k, p.l}); }

Json to_json(const Witness& w) {
    Json j = Json::array({to_json(w.first)});
    if (w.second) j.push_back(to_json(*w.second));
    return j;
}

Json to_json(const WindowSample& s) {
    Json j;
    j["lo"] = s.window.lo;
    j["hi"] = s.window.hi;
    j["defect"] = s.defect.value;
    j["witness"] = s.defect.witness ? to_json(*s.defect.witness) : Json();
    j["value"] = s.defect.witness ? Json(s.defect.witness->value) : Json();
    return j;
}

namespace {

Json samples_json(const std::vector<WindowSample>& samples) {
    Json arr = Json::array();
    for (const auto& s : samples) arr.push_back(to_json(s));
    return arr;
}

Json witness_object(const std::optional<Witness>& w) {
    if (!w) return Json();
    Json j;
    j["at"] = to_json(*w);
    j["value"] = w->value;
    return j;
}

} // namespace

Json to_json(const DefectReport& r) {
    Json j;
    j["property"] = to_string(r.property);
    j["windows"] = samples_json(r.samples);
    j["worst_witness"] = witness_object(r.worst_witness);
    return j;
}

Json to_json(const ConvergenceVerdict& v) {
    Json j;
    j["property"] = to_string(v.report.property);
    j["tag"] = std::string(to_string(v.tag));
    j["horizon"] = v.horizon;
    j["epsilon"] = v.epsilon;
    j["falsifier"] = witness_object(v.falsifier);
    Json spot = Json::array();
    for (const Window& w : v.spot_checked) spot.push_back(Json::array({w.lo, w.hi}));
    j["spot_checked"] = spot;
    j["windows"] = samples_json(v.report.samples);
    j["worst_witness"] = witness_object(v.report.worst_witness);
    return j;
}

Json to_json(const LimitEstimate& e) {
    Json j;
    j["limit"] = e.limit;
    j["estimates"] = e.estimates;
    j["curve"] = samples_json(e.curve);
    return j;
}

Json to_json(const Point2& p) { return Json::array({p.x, p.y}); }

namespace {

Json pair_json(const std::optional<PairWitness>& w) {
    if (!w) return Json();
    Json j;
    j["kind"] = std::string(to_string(w->kind));
    j["p"] = to_json(w->p);
    j["q"] = to_json(w->q);
    j["distance"] = w->distance;
    j["gap"] = w->gap;
    return j;
}

Json defect_json(const Defect& d) {
    Json j;
    j["defect"] = d.value;
    j["witness"] = d.witness ? to_json(*d.witness) : Json();
    return j;
}

Json comparison_json(const WindowComparison& c) {
    Json j;
    j["lo"] = c.window.lo;
    j["hi"] = c.window.hi;
    j["source"] = defect_json(c.source);
    j["image"] = defect_json(c.image);
    return j;
}

} // namespace

Json to_json(const ProbeReport& r) {
    Json j;
    j["mode"] = std::string(to_string(r.mode));
    j["function"] = r.function;
    j["verdict"] = std::string(to_string(r.verdict));
    j["epsilon"] = r.epsilon;
    j["evaluations"] = r.evaluations;
    if (r.target) j["target"] = to_json(*r.target);
    if (!r.approaches.empty()) {
        Json arr = Json::array();
        for (const Approach& a : r.approaches) {
            Json e;
            e["strategy"] = a.strategy;
            e["modulus_n"] = a.modulus_n;
            e["source"] = samples_json(a.source_defects);
            e["image"] = samples_json(a.image_defects);
            e["violated"] = a.violated;
            arr.push_back(std::move(e));
        }
        j["approaches"] = arr;
    }
    if (r.source) j["source"] = r.source->descriptor();
    if (r.modulus_n) j["modulus_n"] = *r.modulus_n;
    if (!r.windows.empty()) {
        Json arr = Json::array();
        for (const auto& c : r.windows) arr.push_back(comparison_json(c));
        j["windows"] = arr;
    }
    if (!r.searches.empty()) {
        Json arr = Json::array();
        for (const DeltaSearch& s : r.searches) {
            Json e;
            e["delta"] = s.delta;
            e["pitch"] = s.pitch;
            e["evaluations"] = s.evaluations;
            e["violated"] = s.violated;
            e["joint"] = pair_json(s.joint);
            e["x_only"] = pair_json(s.x_only);
            e["y_only"] = pair_json(s.y_only);
            arr.push_back(std::move(e));
        }
        j["searches"] = arr;
    }
    if (r.bundle) {
        Json b;
        Json anchors = Json::array();
        for (const IndexPair& a : r.bundle->anchors) anchors.push_back(to_json(a));
        b["anchors"] = anchors;
        Json bands = Json::array();
        for (std::size_t k = 1; k <= r.bundle->pairs.size() + 1; ++k)
            bands.push_back(r.bundle->layout->start(static_cast<std::int64_t>(k)));
        b["band_starts"] = bands;
        Json blocks = Json::array();
        for (const auto& c : r.bundle->blocks) blocks.push_back(comparison_json(c));
        b["blocks"] = blocks;
        j["bundle"] = b;
    }
    return j;
}

Json to_json(const Point& p) {
    if (const auto* s = std::get_if<std::string>(&p)) return *s;
    return Json(std::get<std::vector<double>>(p));
}

namespace {

Json flag_json(const AxiomFlag& f) {
    Json j;
    j["holds"] = f.holds;
    if (!f.holds) {
        j["axiom"] = f.axiom;
        Json w = Json::array();
        for (const Point& p : f.witness) w.push_back(to_json(p));
        j["witness"] = w;
    }
    return j;
}

} // namespace

Json to_json(const AxiomReport& r) {
    Json j;
    j["sample_size"] = r.sample_size;
    j["pseudometric"] = flag_json(r.pseudometric);
    j["metric"] = flag_json(r.metric);
    j["ultrametric"] = flag_json(r.ultrametric);
    return j;
}

Json to_json(const NonIncrementalReport& r) {
    Json j;
    j["space"] = r.space;
    j["attributed"] = r.attributed;
    j["unexplained"] = r.unexplained;
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        Json e;
        e["sequence"] = row.sequence;
        e["lo"] = row.window.lo;
        e["hi"] = row.window.hi;
        e["cauchy"] = defect_json(row.cauchy);
        e["qc"] = defect_json(row.qc);
        e["ultrametric_on_sample"] = row.ultrametric_on_sample;
        e["inequality_holds"] = row.inequality_holds;
        if (!row.chain_triple.empty()) {
            Json t = Json::array();
            for (const IndexPair& p : row.chain_triple) t.push_back(to_json(p));
            e["chain_triple"] = t;
            e["triple_revalidated"] = row.triple_revalidated;
        }
        rows.push_back(std::move(e));
    }
    j["rows"] = rows;
    return j;
}

Json to_json(const EmbeddingCheck& c) {
    Json j;
    j["pass"] = c.pass;
    if (!c.pass) {
        j["cell"] = c.failed_cell ? to_json(*c.failed_cell) : Json();
        j["neighbor"] = c.neighbor ? to_json(*c.neighbor) : Json();
        j["reason"] = c.reason;
    }
    return j;
}

std::string defect_csv(const std::vector<WindowSample>& samples) {
    std::string out = "window_lo,window_hi,defect\n";
    for (const auto& s : samples)
        out += std::to_string(s.window.lo) + "," + std::to_string(s.window.hi) + "," + format_double(s.defect.value) + "\n";
    return out;
}

} // namespace dseq::report
