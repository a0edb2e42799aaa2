#include "ladder/exact_rational.hpp"

#include "ladder/error.hpp"

namespace ladder {

std::vector<Rational> survival_rational(const IncrementModel& m, double a, std::int64_t n) {
    if (!m.is_lattice()) throw DomainError("exact mode needs a lattice model");
    if (n < 0 || n > 64) throw DomainError("exact mode supports 0 <= n <= 64");
    if (m.mass.size() > 64) throw DomainError("exact mode supports at most 64 support points");
    RationalShift r = lattice_shift(m, a);
    std::vector<Rational> taps(m.mass.size());
    for (std::size_t i = 0; i < taps.size(); ++i) taps[i] = Rational(m.mass[i]);
    std::vector<Rational> out(static_cast<std::size_t>(n) + 1);
    out[0] = 1;
    std::vector<Rational> cur{Rational(1)};
    std::int64_t base = 0;
    for (std::int64_t j = 1; j <= n; ++j) {
        std::vector<Rational> nxt(cur.size() + taps.size() - 1);
        for (std::size_t i = 0; i < cur.size(); ++i) {
            if (cur[i] == 0) continue;
            for (std::size_t k = 0; k < taps.size(); ++k)
                if (taps[k] != 0) nxt[i + k] += cur[i] * taps[k];
        }
        std::int64_t nbase = base + m.lo;
        // Survive iff T_j * q >= j * p.
        std::int64_t first = 0;
        while (first < static_cast<std::int64_t>(nxt.size()) && (nbase + first) * r.q < j * r.p) ++first;
        nxt.erase(nxt.begin(), nxt.begin() + first);
        nbase += first;
        Rational s = 0;
        for (const auto& v : nxt) s += v;
        out[static_cast<std::size_t>(j)] = s;
        cur.swap(nxt);
        base = nbase;
    }
    return out;
}

}  // namespace ladder
