#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace thurston {

/// How a symbolic chart variable is computed from the real chart coordinates.
/// Conformal charts use z = x + iy and zb = x - iy; the pair is treated as
/// independent symbols during differentiation (Wirtinger convention).
struct VariableBinding {
    enum class Kind { real, holomorphic, antiholomorphic };
    Kind kind = Kind::real;
    std::size_t re = 0;  // coordinate index of the real part
    std::size_t im = 0;  // coordinate index of the imaginary part (conformal kinds only)

    friend bool operator==(const VariableBinding&, const VariableBinding&) = default;
};

/// e^{m * v} for integer weights m on one real variable v.
struct ExpAtom {
    std::size_t base = 0;

    friend bool operator==(const ExpAtom&, const ExpAtom&) = default;
};

enum class LogKind {
    one_minus,  // log(1 - z zb), written log1m
    one_plus,   // log(1 + z zb), written log1p
};

struct LogAtom {
    LogKind kind = LogKind::one_minus;
    std::size_t z = 0;
    std::size_t zb = 0;

    [[nodiscard]] std::string_view name() const { return kind == LogKind::one_minus ? "log1m" : "log1p"; }
    /// 1 - z zb is -1, 1 + z zb is +1
    [[nodiscard]] int sign() const { return kind == LogKind::one_minus ? -1 : 1; }

    friend bool operator==(const LogAtom&, const LogAtom&) = default;
};

/// The atoms a geometry's functions are built from, together with the real chart
/// they are evaluated on.
struct AtomSet {
    std::vector<std::string> variables;
    std::vector<VariableBinding> bindings;  // one per variable
    std::vector<std::string> coordinates;   // real chart coordinates
    std::optional<ExpAtom> exp;
    std::optional<LogAtom> log;
    std::vector<std::array<std::size_t, 2>> unit_disks;  // coordinate pairs with x^2 + y^2 < 1
    std::vector<std::size_t> positive_coordinates;      // coordinates that must stay > 0

    [[nodiscard]] std::optional<std::size_t> index_of(std::string_view name) const {
        const auto it = std::find(variables.begin(), variables.end(), name);
        if (it == variables.end()) return std::nullopt;
        return static_cast<std::size_t>(it - variables.begin());
    }

    [[nodiscard]] bool owns_log(std::size_t var) const { return log && (log->z == var || log->zb == var); }

    /// Strict chart constraints, shrunk inwards by `margin`.
    [[nodiscard]] bool admissible(std::span<const double> p, double margin = 0.0) const {
        if (p.size() != coordinates.size()) return false;
        for (const auto& [x, y] : unit_disks)
            if (!(p[x] * p[x] + p[y] * p[y] < 1.0 - margin)) return false;
        for (auto c : positive_coordinates)
            if (!(p[c] > margin)) return false;
        return true;
    }

    friend bool operator==(const AtomSet&, const AtomSet&) = default;
};

using AtomSetPtr = std::shared_ptr<const AtomSet>;

inline bool same_atoms(const AtomSetPtr& a, const AtomSetPtr& b) { return a == b || (a && b && *a == *b); }

}  // namespace thurston
