// Serialization boundary: JSON density documents, CSV/JSON moment tables,
// classification and growth reports. Numbers travel as strings only --
// exact "p/q" rationals in exact mode, full-precision decimals in big-float
// mode; binary floats never appear in serialized form.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qcalc/determinacy.hpp"
#include "qcalc/growth.hpp"
#include "qcalc/qdensity.hpp"
#include "qcalc/qmoments.hpp"
#include "qcalc/stieltjes.hpp"

namespace qcalc::io {

// Exact for rationals ("p/q" or integer), full-precision scientific for
// big floats. Deterministic.
std::string number_string(const Rational& x);
std::string number_string(const BigFloat& x);

// Fixed 40 significant digits, for CSV columns. Deterministic rounding.
std::string decimal40(const Rational& x);
std::string decimal40(const BigFloat& x);

// Density documents:
// {
//   "q": "p/q or decimal", "window": [n_lo, n_hi], "values": [strings],
//   "tail_upper": string?, "tail_lower": string?,
//   "decay_upper": {"scale": s, "growth": g, "from": n}?,
//   "decay_lower": {...}?,
//   "family": {"name": "q_exponential", "lambda": string}?
// }
// Importing a family document rebuilds the density from its parameters over
// the document's window; custom documents load values verbatim.
template <class R>
std::string export_density_json(const qdensity::QDensityHandle<R>& f);
template <class R>
qdensity::QDensityHandle<R> import_density_json(const std::string& text,
                                                const NumericContext& ctx);

template <class R>
std::string moment_table_csv(const qmoments::MomentTable<R>& table);
template <class R>
std::string moment_table_json(const qmoments::MomentTable<R>& table);

template <class R>
std::string classification_json(const determinacy::ClassificationReport<R>& report);

std::string growth_csv(const growth::GrowthReport& report);

template <class R>
std::string stieltjes_class_json(const qdensity::QDensityHandle<R>& f,
                                 const stieltjes::Perturbation<R>& h,
                                 const std::vector<stieltjes::StieltjesMember<R>>& members);

// One row per order: the base table, each member's value, the largest
// deviation and the certificate budget it must stay within.
template <class R>
std::string moment_comparison_csv(
    const qmoments::MomentTable<R>& base,
    const std::vector<std::pair<Rational, qmoments::MomentTable<R>>>& member_tables);

}  // namespace qcalc::io
