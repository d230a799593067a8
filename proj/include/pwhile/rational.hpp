// Copyright (c) pwhile contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace pwhile {

using Int = mpz_class;
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline Rat rat_of(const Int& num, const Int& den = 1) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

// Canonical text form: "n" for integers, "n/d" otherwise.
inline std::string rat_str(const Rat& r) {
    if (r.get_den() == 1) {
        return r.get_num().get_str();
    }
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline std::string int_str(const Int& z) { return z.get_str(); }

// Decimal rendering for human-facing statistics; analysis paths stay exact.
std::string rat_decimal(const Rat& r, int digits = 6);

// Nonnegative rationals extended with infinity, the codomain of expectations.
struct ExtRat {
    bool infinite = false;
    Rat value;

    ExtRat() = default;
    ExtRat(Rat v) : value(std::move(v)) {}

    static ExtRat inf() {
        ExtRat e;
        e.infinite = true;
        return e;
    }

    bool operator==(const ExtRat& o) const {
        if (infinite || o.infinite) return infinite == o.infinite;
        return value == o.value;
    }
    bool operator<=(const ExtRat& o) const {
        if (o.infinite) return true;
        if (infinite) return false;
        return value <= o.value;
    }
    bool operator<(const ExtRat& o) const { return *this <= o && !(*this == o); }

    ExtRat operator+(const ExtRat& o) const {
        if (infinite || o.infinite) return inf();
        return ExtRat(value + o.value);
    }
    ExtRat operator*(const Rat& k) const {
        if (k == 0) return ExtRat(Rat(0));
        if (infinite) return inf();
        return ExtRat(value * k);
    }

    std::string str() const { return infinite ? "inf" : rat_str(value); }
};

inline ExtRat ext_max(const ExtRat& a, const ExtRat& b) { return a <= b ? b : a; }

}  // namespace pwhile
