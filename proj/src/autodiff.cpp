#include "procreate/autodiff.hpp"

namespace procreate::autodiff {

namespace {

std::vector<Rev> make_inputs(Tape& tape, std::span<const double> x) {
    std::vector<Rev> in;
    in.reserve(x.size());
    for (double v : x) in.push_back(tape.input(v));
    return in;
}

}  // namespace

double eval(const Program& program, std::span<const double> x) {
    Tape tape;
    auto in = make_inputs(tape, x);
    return program(tape, in).value();
}

Vec gradient(const Program& program, std::span<const double> x) {
    Tape tape;
    auto in = make_inputs(tape, x);
    Rev out = program(tape, in);
    auto adj = tape.backward(out);
    Vec g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        g[i] = adj[static_cast<std::size_t>(in[i].id())];
    return g;
}

Vec finite_diff(const Program& program, std::span<const double> x, double h) {
    if (!(h > 0.0)) throw ConfigError("finite_diff needs h > 0");
    Vec g(x.size());
    Vec xp(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = xp[i];
        xp[i] = xi + h;
        double fp = eval(program, xp);
        xp[i] = xi - h;
        double fm = eval(program, xp);
        xp[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

}  // namespace procreate::autodiff
