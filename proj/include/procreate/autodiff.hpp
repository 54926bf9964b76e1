#ifndef PROCREATE_AUTODIFF_HPP
#define PROCREATE_AUTODIFF_HPP

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "procreate/common.hpp"

namespace procreate::autodiff {

class Tape;

// A scalar tracked on a recording tape. id < 0 marks a constant (no node).
class Rev {
public:
    Rev() = default;
    Rev(double v) : value_(v) {}  // NOLINT: implicit constant lift is intended
    Rev(double v, int id, Tape* tape) : value_(v), id_(id), tape_(tape) {}

    double value() const { return value_; }
    int id() const { return id_; }
    Tape* tape() const { return tape_; }

private:
    double value_ = 0.0;
    int id_ = -1;
    Tape* tape_ = nullptr;
};

class Tape {
public:
    struct Node {
        int parent_a = -1;
        int parent_b = -1;
        double partial_a = 0.0;
        double partial_b = 0.0;
    };

    Rev input(double v) {
        nodes_.push_back({});
        return Rev(v, static_cast<int>(nodes_.size()) - 1, this);
    }

    Rev emit(const char* op, double value, const Rev& a, double da) {
        return emit(op, value, a, da, Rev(), 0.0);
    }

    Rev emit(const char* op, double value, const Rev& a, double da, const Rev& b, double db) {
        if (!std::isfinite(value))
            throw EvalError(std::string("non-finite intermediate in primitive '") + op + "'");
        if (a.id() < 0 && b.id() < 0) return Rev(value);  // all-constant subtree
        Node n;
        n.parent_a = a.id();
        n.partial_a = da;
        n.parent_b = b.id();
        n.partial_b = db;
        nodes_.push_back(n);
        return Rev(value, static_cast<int>(nodes_.size()) - 1, this);
    }

    // Adjoints of every node given a unit adjoint on `output`.
    std::vector<double> backward(const Rev& output) const {
        std::vector<double> adj(nodes_.size(), 0.0);
        if (output.id() < 0) return adj;  // constant output, zero gradient
        adj[static_cast<std::size_t>(output.id())] = 1.0;
        for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
            const Node& n = nodes_[static_cast<std::size_t>(i)];
            const double a = adj[static_cast<std::size_t>(i)];
            if (a == 0.0) continue;
            if (n.parent_a >= 0) adj[static_cast<std::size_t>(n.parent_a)] += a * n.partial_a;
            if (n.parent_b >= 0) adj[static_cast<std::size_t>(n.parent_b)] += a * n.partial_b;
        }
        return adj;
    }

    std::size_t size() const { return nodes_.size(); }

private:
    std::vector<Node> nodes_;
};

inline Tape* tape_of(const Rev& a, const Rev& b) {
    return a.tape() ? a.tape() : b.tape();
}

inline Rev operator+(const Rev& a, const Rev& b) {
    Tape* t = tape_of(a, b);
    double v = a.value() + b.value();
    if (!t) return Rev(v);
    return t->emit("add", v, a, 1.0, b, 1.0);
}

inline Rev operator-(const Rev& a, const Rev& b) {
    Tape* t = tape_of(a, b);
    double v = a.value() - b.value();
    if (!t) return Rev(v);
    return t->emit("sub", v, a, 1.0, b, -1.0);
}

inline Rev operator-(const Rev& a) { return Rev(0.0) - a; }

inline Rev operator*(const Rev& a, const Rev& b) {
    Tape* t = tape_of(a, b);
    double v = a.value() * b.value();
    if (!t) return Rev(v);
    return t->emit("mul", v, a, b.value(), b, a.value());
}

inline Rev operator/(const Rev& a, const Rev& b) {
    Tape* t = tape_of(a, b);
    double v = a.value() / b.value();
    if (!t) return Rev(v);
    return t->emit("div", v, a, 1.0 / b.value(), b, -a.value() / (b.value() * b.value()));
}

inline Rev& operator+=(Rev& a, const Rev& b) { a = a + b; return a; }
inline Rev& operator-=(Rev& a, const Rev& b) { a = a - b; return a; }
inline Rev& operator*=(Rev& a, const Rev& b) { a = a * b; return a; }

inline bool operator<(const Rev& a, const Rev& b) { return a.value() < b.value(); }
inline bool operator>(const Rev& a, const Rev& b) { return a.value() > b.value(); }
inline bool operator<=(const Rev& a, const Rev& b) { return a.value() <= b.value(); }
inline bool operator>=(const Rev& a, const Rev& b) { return a.value() >= b.value(); }

inline Rev sqrt(const Rev& a) {
    double v = std::sqrt(a.value());
    if (!a.tape()) {
        if (!std::isfinite(v)) throw EvalError("non-finite intermediate in primitive 'sqrt'");
        return Rev(v);
    }
    return a.tape()->emit("sqrt", v, a, 0.5 / v);
}

inline Rev exp(const Rev& a) {
    double v = std::exp(a.value());
    if (!a.tape()) return Rev(v);
    return a.tape()->emit("exp", v, a, v);
}

inline Rev log(const Rev& a) {
    double v = std::log(a.value());
    if (!a.tape()) {
        if (!std::isfinite(v)) throw EvalError("non-finite intermediate in primitive 'log'");
        return Rev(v);
    }
    return a.tape()->emit("log", v, a, 1.0 / a.value());
}

inline Rev tanh(const Rev& a) {
    double v = std::tanh(a.value());
    if (!a.tape()) return Rev(v);
    return a.tape()->emit("tanh", v, a, 1.0 - v * v);
}

// max over a list; derivative flows through the selected branch only.
// Ties resolve to the lowest index (strict > comparison keeps the first max).
inline std::size_t argmax_index(std::span<const Rev> xs) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (xs[i].value() > xs[best].value()) best = i;
    return best;
}

inline Rev vmax(std::span<const Rev> xs) {
    if (xs.empty()) throw EvalError("max over empty list");
    return xs[argmax_index(xs)];
}

// Lower-bounds a value; below the floor the derivative is cut (used as the
// cosine-denominator guard).
inline Rev floor_at(const Rev& a, double lo) {
    if (a.value() >= lo) return a;
    return Rev(lo);
}

// Scalar program from a D-vector input, recorded through Rev arithmetic.
using Program = std::function<Rev(Tape&, std::span<const Rev>)>;

double eval(const Program& program, std::span<const double> x);

// Exact gradient by reverse accumulation over the recorded tape.
Vec gradient(const Program& program, std::span<const double> x);

// Central-difference oracle, one coordinate at a time.
Vec finite_diff(const Program& program, std::span<const double> x, double h);

}  // namespace procreate::autodiff

#endif
