#include "simstack/stack_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>

namespace simstack {

void save_stack(const StackState& stack, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_stack: cannot open " + path);
    out << stack.layers() << " " << stack.atoms() << "\n";
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (int l = 0; l < stack.layers(); ++l)
        for (int n = 0; n < stack.atoms(); ++n)
            out << stack.amplitudes(l, n) << "," << stack.phases(l, n) << "\n";
    if (!out) throw std::runtime_error("save_stack: write failed");
}

StackState load_stack(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_stack: cannot open " + path);
    int layers = 0;
    int atoms = 0;
    if (!(in >> layers >> atoms) || layers < 1 || atoms < 1)
        throw std::runtime_error("load_stack: malformed header in " + path);
    StackState stack;
    stack.amplitudes.resize(layers, atoms);
    stack.phases.resize(layers, atoms);
    for (int l = 0; l < layers; ++l)
        for (int n = 0; n < atoms; ++n) {
            double a = 0.0;
            double p = 0.0;
            char comma = 0;
            if (!(in >> a >> comma >> p) || comma != ',')
                throw std::runtime_error("load_stack: malformed entry in " + path);
            stack.amplitudes(l, n) = a;
            stack.phases(l, n) = p;
        }
    return stack;
}

}  // namespace simstack
