#include "qcalc/io.hpp"

#include <json.hpp>

namespace qcalc::io {

using nlohmann::json;

std::string number_string(const Rational& x) { return x.str(); }

std::string number_string(const BigFloat& x) {
    // digits = 0 requests enough digits for exact read-back.
    return x.str(0, std::ios_base::scientific);
}

std::string decimal40(const Rational& x) {
    PrecisionGuard guard(160);
    return BigFloat(x).str(40, std::ios_base::scientific);
}

std::string decimal40(const BigFloat& x) { return x.str(40, std::ios_base::scientific); }

namespace {

template <class R>
json envelope_json(const TailEnvelope<R>& env) {
    return json{{"scale", number_string(env.scale)},
                {"growth", number_string(env.growth)},
                {"from", env.from_index}};
}

template <class R>
TailEnvelope<R> envelope_from_json(const json& j) {
    TailEnvelope<R> env;
    env.scale = from_rational<R>(parse_number(j.at("scale").get<std::string>()).value);
    env.growth = from_rational<R>(parse_number(j.at("growth").get<std::string>()).value);
    env.from_index = j.at("from").get<long>();
    return env;
}

template <class R>
json density_to_json(const qdensity::QDensityHandle<R>& f) {
    json doc;
    doc["q"] = f.q().value().str();
    const LatticeWindow& w = f.base().window();
    doc["window"] = json::array({w.n_lo, w.n_hi});
    json values = json::array();
    for (long n = w.n_lo; n <= w.n_hi; ++n) values.push_back(number_string(f.base().at(n)));
    doc["values"] = std::move(values);
    if (f.base().upper_tail_bound()) {
        doc["tail_upper"] = number_string(*f.base().upper_tail_bound());
    }
    if (f.base().lower_tail_bound()) {
        doc["tail_lower"] = number_string(*f.base().lower_tail_bound());
    }
    if (f.base().decay_upper()) doc["decay_upper"] = envelope_json(*f.base().decay_upper());
    if (f.base().decay_lower()) doc["decay_lower"] = envelope_json(*f.base().decay_lower());
    if (f.family()) {
        doc["family"] = json{{"name", "q_exponential"}, {"lambda", f.family()->lambda.str()}};
    }
    doc["mass"] = number_string(f.mass().value);
    doc["mass_certificate"] = number_string(f.mass().cert.bound);
    doc["normalized"] = f.norm_certified();
    return doc;
}

template <class R>
qdensity::QDensityHandle<R> density_from_json(const std::string& text,
                                              const NumericContext& ctx) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw qcalc::ParseError(std::string("bad density JSON: ") + e.what());
    }
    try {
        const QParam q(parse_number(doc.at("q").get<std::string>()).value);
        LatticeWindow w{doc.at("window").at(0).get<long>(), doc.at("window").at(1).get<long>()};
        if (doc.contains("family")) {
            const auto& fam = doc.at("family");
            if (fam.at("name").get<std::string>() != "q_exponential") {
                throw qcalc::ParseError("unknown density family: " +
                                        fam.at("name").get<std::string>());
            }
            const Rational lambda = parse_number(fam.at("lambda").get<std::string>()).value;
            qdensity::QExponentialOptions options;
            options.window = w;
            return qdensity::make_q_exponential<R>(lambda, q, ctx, options);
        }
        ModeGuard<R> guard(ctx);
        LatticeFunctionData<R> data;
        data.window = w;
        data.values.reserve(static_cast<std::size_t>(w.size()));
        for (const auto& v : doc.at("values")) {
            data.values.push_back(from_rational<R>(parse_number(v.get<std::string>()).value));
        }
        if (doc.contains("tail_upper")) {
            data.upper_tail_bound =
                from_rational<R>(parse_number(doc.at("tail_upper").get<std::string>()).value);
        }
        if (doc.contains("tail_lower")) {
            data.lower_tail_bound =
                from_rational<R>(parse_number(doc.at("tail_lower").get<std::string>()).value);
        }
        if (doc.contains("decay_upper")) {
            data.decay_upper = envelope_from_json<R>(doc.at("decay_upper"));
        }
        if (doc.contains("decay_lower")) {
            data.decay_lower = envelope_from_json<R>(doc.at("decay_lower"));
        }
        return qdensity::make_custom(std::move(data), q, ctx);
    } catch (const json::exception& e) {
        throw qcalc::ParseError(std::string("bad density JSON: ") + e.what());
    }
}

const char* mode_name(NumericMode mode) {
    return mode == NumericMode::exact_rational ? "exact" : "float";
}

template <class R>
json moment_table_to_json(const qmoments::MomentTable<R>& table) {
    json doc;
    doc["q"] = table.q.str();
    doc["mode"] = mode_name(table.ctx.mode);
    doc["precision_bits"] = table.ctx.precision_bits;
    doc["tolerance"] = table.ctx.target_tolerance.str();
    json entries = json::array();
    for (unsigned k = 0; k < table.entries.size(); ++k) {
        entries.push_back(json{{"k", k},
                               {"value", number_string(table.entries[k].value)},
                               {"certificate", number_string(table.entries[k].cert.bound)}});
    }
    doc["moments"] = std::move(entries);
    return doc;
}

}  // namespace

template <class R>
std::string export_density_json(const qdensity::QDensityHandle<R>& f) {
    return density_to_json(f).dump(2) + "\n";
}

template <class R>
qdensity::QDensityHandle<R> import_density_json(const std::string& text,
                                                const NumericContext& ctx) {
    return density_from_json<R>(text, ctx);
}

template <class R>
std::string moment_table_csv(const qmoments::MomentTable<R>& table) {
    std::string out = "k,value,certificate\n";
    for (unsigned k = 0; k < table.entries.size(); ++k) {
        out += std::to_string(k) + "," + decimal40(table.entries[k].value) + "," +
               decimal40(table.entries[k].cert.bound) + "\n";
    }
    return out;
}

template <class R>
std::string moment_table_json(const qmoments::MomentTable<R>& table) {
    return moment_table_to_json(table).dump(2) + "\n";
}

template <class R>
std::string classification_json(const determinacy::ClassificationReport<R>& report) {
    json doc;
    doc["verdict"] = determinacy::verdict_name(report.verdict);
    doc["constant_estimate"] = number_string(report.constant_estimate);
    json witness = json::array();
    for (const R& r : report.witness) witness.push_back(number_string(r));
    doc["witness"] = std::move(witness);
    doc["thresholds"] = json{{"trend_keep", report.thresholds.trend_keep},
                             {"decay_drop", report.thresholds.decay_drop}};
    doc["rationale"] = report.rationale;
    return doc.dump(2) + "\n";
}

std::string growth_csv(const growth::GrowthReport& report) {
    std::string out = "m,log_max_modulus,envelope,deviation\n";
    for (std::size_t i = 0; i < report.m.size(); ++i) {
        out += std::to_string(report.m[i]) + "," + decimal40(report.log_max_modulus[i]) + "," +
               decimal40(report.envelope[i]) + "," + decimal40(report.deviation[i]) + "\n";
    }
    return out;
}

template <class R>
std::string stieltjes_class_json(const qdensity::QDensityHandle<R>& f,
                                 const stieltjes::Perturbation<R>& h,
                                 const std::vector<stieltjes::StieltjesMember<R>>& members) {
    json doc;
    doc["q"] = f.q().value().str();
    if (f.family()) doc["lambda"] = f.family()->lambda.str();
    doc["scale"] = number_string(h.scale);
    json sup;
    sup["upper_bound"] = number_string(h.sup.value);
    if (h.sup.attained_index) {
        sup["attained_index"] = *h.sup.attained_index;
    } else {
        sup["attained_index"] = nullptr;
    }
    sup["certificate"] = number_string(h.sup.cert.bound);
    sup["method"] = h.sup.cert.method;
    doc["sup_norm"] = std::move(sup);
    doc["orthogonality_certified_up_to"] = h.orthogonality_certified_up_to;
    json residuals = json::array();
    for (unsigned k = 0; k < h.residuals.size(); ++k) {
        const auto& r = h.residuals[k];
        residuals.push_back(json{{"k", k},
                                 {"residual", number_string(r.residual.value)},
                                 {"certificate", number_string(r.residual.cert.bound)},
                                 {"peak_term", number_string(r.peak)},
                                 {"product_oracle_zero", r.product_oracle_zero},
                                 {"agreement", r.agreement}});
    }
    doc["orthogonality"] = std::move(residuals);
    json ms = json::array();
    for (const auto& member : members) {
        json m;
        m["epsilon"] = member.epsilon.str();
        const LatticeWindow& w = member.handle.base().window();
        m["window"] = json::array({w.n_lo, w.n_hi});
        json values = json::array();
        for (long n = w.n_lo; n <= w.n_hi; ++n) {
            values.push_back(number_string(member.handle.base().at(n)));
        }
        m["values"] = std::move(values);
        m["mass"] = number_string(member.handle.mass().value);
        m["mass_certificate"] = number_string(member.handle.mass().cert.bound);
        m["normalized"] = member.handle.norm_certified();
        ms.push_back(std::move(m));
    }
    doc["members"] = std::move(ms);
    return doc.dump(2) + "\n";
}

template <class R>
std::string moment_comparison_csv(
    const qmoments::MomentTable<R>& base,
    const std::vector<std::pair<Rational, qmoments::MomentTable<R>>>& member_tables) {
    std::string out = "k,base";
    for (const auto& [eps, table] : member_tables) out += ",eps=" + eps.str();
    out += ",max_deviation,certificate_budget,within_certificates\n";
    for (unsigned k = 0; k < base.entries.size(); ++k) {
        using boost::multiprecision::abs;
        R max_dev(0);
        R budget(0);
        std::string row = std::to_string(k) + "," + decimal40(base.entries[k].value);
        for (const auto& [eps, table] : member_tables) {
            const R dev = abs(table.entries[k].value - base.entries[k].value);
            if (dev > max_dev) max_dev = dev;
            const R b = table.entries[k].cert.bound + base.entries[k].cert.bound;
            if (b > budget) budget = b;
            row += "," + decimal40(table.entries[k].value);
        }
        row += "," + decimal40(max_dev) + "," + decimal40(budget) + "," +
               (max_dev <= budget ? "yes" : "no");
        out += row + "\n";
    }
    return out;
}

#define QCALC_INSTANTIATE_IO(R)                                                                \
    template std::string export_density_json<R>(const qdensity::QDensityHandle<R>&);          \
    template qdensity::QDensityHandle<R> import_density_json<R>(const std::string&,           \
                                                                const NumericContext&);       \
    template std::string moment_table_csv<R>(const qmoments::MomentTable<R>&);                \
    template std::string moment_table_json<R>(const qmoments::MomentTable<R>&);               \
    template std::string classification_json<R>(const determinacy::ClassificationReport<R>&); \
    template std::string stieltjes_class_json<R>(                                             \
        const qdensity::QDensityHandle<R>&, const stieltjes::Perturbation<R>&,                \
        const std::vector<stieltjes::StieltjesMember<R>>&);                                   \
    template std::string moment_comparison_csv<R>(                                            \
        const qmoments::MomentTable<R>&,                                                      \
        const std::vector<std::pair<Rational, qmoments::MomentTable<R>>>&);

QCALC_INSTANTIATE_IO(Rational)
QCALC_INSTANTIATE_IO(BigFloat)

#undef QCALC_INSTANTIATE_IO

}  // namespace qcalc::io
