#pragma once

#include <string>

#include <json.hpp>

#include "bigtoda/algebra.hpp"
#include "bigtoda/difference_op.hpp"
#include "bigtoda/hamiltonian.hpp"

namespace bigtoda {

using Json = nlohmann::ordered_json;

// ----- JSON -------------------------------------------------------------------

/// Canonical form: sorted monomial keys, rational coefficients as "p/q".
inline Json to_json(const AlgebraElement& a)
{
    Json terms = Json::object();
    for (const auto& [m, c] : a.terms()) terms[mono_key(m)] = rat_to_string(c);
    return Json{{"K", a.trunc_order()}, {"valid", a.valid_order()}, {"terms", terms}};
}

/// Coefficients sorted descending in the Lambda order, window recorded.
inline Json to_json(const DifferenceOperator& op)
{
    Json coeffs = Json::array();
    for (auto it = op.coeffs().rbegin(); it != op.coeffs().rend(); ++it)
        coeffs.push_back(Json::array({it->first, to_json(it->second)}));
    auto bound = [](int b) -> Json {
        if (b >= WINF) return "+inf";
        if (b <= -WINF) return "-inf";
        return b;
    };
    return Json{{"window", Json::array({bound(op.exact_lo()), bound(op.exact_hi())})},
                {"support", Json::array({bound(op.supp_lo()), bound(op.supp_hi())})},
                {"coeffs", coeffs}};
}

inline Json to_json(const DiffDiffOperator& op)
{
    Json parts = Json::array();
    for (const auto& [j, d] : op.parts()) parts.push_back(Json::array({j, to_json(d)}));
    return Json{{"dpoly", parts}};
}

// ----- LaTeX ------------------------------------------------------------------

inline std::string latex_rat(const Rat& r)
{
    if (r.get_den() == 1) return r.get_num().get_str();
    std::string num = r.get_num().get_str();
    bool neg = !num.empty() && num[0] == '-';
    if (neg) num = num.substr(1);
    return std::string(neg ? "-" : "") + "\\frac{" + num + "}{" + r.get_den().get_str() + "}";
}

inline std::string latex_power(const std::string& base, int e)
{
    if (e == 1) return base;
    return base + "^{" + std::to_string(e) + "}";
}

inline std::string latex_jet(const std::string& base, int der, int e)
{
    std::string s = base;
    if (der == 1)
        s += "'";
    else if (der == 2)
        s += "''";
    else if (der >= 3)
        s += "^{(" + std::to_string(der) + ")}";
    if (e != 1) s = "\\left(" + s + "\\right)^{" + std::to_string(e) + "}";
    return s;
}

inline std::string to_latex(const Monomial& m, int M)
{
    std::string s;
    auto push = [&s](const std::string& t) {
        if (!s.empty()) s += "\\,";
        s += t;
    };
    if (m.eps != 0) push(latex_power("\\epsilon", m.eps));
    for (const auto& [g, e] : m.fac) {
        if (g.kind == Gen::Kind::U)
            push(latex_jet("u_{" + std::to_string(g.idx) + "}", g.der, e));
        else if (g.kind == Gen::Kind::Aux)
            push(latex_jet("f", g.der, e));
    }
    if (m.v_exp != 0) push(latex_power("v", m.v_exp));
    for (const auto& [g, e] : m.fac)
        if (g.kind == Gen::Kind::VDer) push(latex_jet("v", g.der, e));
    if (m.logu_exp != 0) push(latex_power("\\log u_{" + std::to_string(-M) + "}", m.logu_exp));
    if (s.empty()) s = "1";
    return s;
}

inline std::string to_latex(const AlgebraElement& a)
{
    if (a.is_zero()) return "0";
    std::string s;
    for (const auto& [m, c] : a.terms()) {
        std::string cs = latex_rat(c);
        std::string ms = to_latex(m, a.params().M);
        bool neg = !cs.empty() && cs[0] == '-';
        std::string body;
        if (cs == "1" && ms != "1")
            body = ms;
        else if (cs == "-1" && ms != "1")
            body = "-" + ms;
        else
            body = cs + (ms == "1" ? "" : "\\," + ms);
        if (s.empty())
            s = body;
        else
            s += (neg || body[0] == '-') ? body : "+" + body;
    }
    return s;
}

inline std::string to_latex(const DifferenceOperator& op)
{
    if (op.coeffs().empty()) return "0";
    std::string s;
    for (auto it = op.coeffs().rbegin(); it != op.coeffs().rend(); ++it) {
        std::string body = "\\left(" + to_latex(it->second) + "\\right)";
        if (it->first != 0) body += "\\Lambda^{" + std::to_string(it->first) + "}";
        if (!s.empty()) s += "+";
        s += body;
    }
    return s;
}

inline std::string to_latex(const DiffDiffOperator& op)
{
    std::string s;
    for (const auto& [j, d] : op.parts()) {
        if (d.stored_zero() && j > 0) continue;
        std::string body = to_latex(d);
        if (j == 1)
            body = "\\left(" + body + "\\right)\\epsilon\\partial";
        else if (j > 1)
            body = "\\left(" + body + "\\right)(\\epsilon\\partial)^{" + std::to_string(j) + "}";
        if (!s.empty()) s += "+";
        s += body;
    }
    return s.empty() ? "0" : s;
}

// ----- bracket matrices ---------------------------------------------------------

/// Entries serialized through their canonical action on the test function.
inline Json to_json(const hamiltonian::BracketMatrix& m)
{
    Json rows = Json::array();
    for (int n = -m.M; n <= m.N - 1; ++n) {
        Json row = Json::array();
        for (int c = -m.M; c <= m.N - 1; ++c) row.push_back(to_json(m.at(n, c)));
        rows.push_back(row);
    }
    return Json{{"index_range", Json::array({-m.M, m.N - 1})}, {"entries", rows}};
}

inline std::string to_latex(const hamiltonian::BracketMatrix& m)
{
    std::string s = "\\begin{pmatrix}\n";
    for (int n = -m.M; n <= m.N - 1; ++n) {
        for (int c = -m.M; c <= m.N - 1; ++c) {
            s += to_latex(m.at(n, c));
            s += (c == m.N - 1) ? "" : " & ";
        }
        s += (n == m.N - 1) ? "\n" : " \\\\\n";
    }
    s += "\\end{pmatrix}";
    return s;
}

} // namespace bigtoda
