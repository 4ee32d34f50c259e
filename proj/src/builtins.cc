#include <algorithm>
#include <stdexcept>

#include "qcsm/circuit.h"

namespace qcsm {

// Defined in circuit.cc; sorts ops and materializes idles.
Circuit finalize_circuit(int num_qubits, int num_timesteps, std::vector<Operation> ops,
                         std::vector<ObservableDecl> observables);

namespace {

struct Builder {
    int n = 0, t_max = 0;
    std::vector<Operation> ops;
    std::vector<ObservableDecl> obs;

    void r(int t, Basis b, int q) {
        ops.push_back({OpKind::Reset, t, b, Gate::I, {q}});
        t_max = std::max(t_max, t);
    }
    void m(int t, Basis b, int q) {
        ops.push_back({OpKind::Measure, t, b, Gate::I, {q}});
        t_max = std::max(t_max, t);
    }
    void m2(int t, Basis b, int a, int bq) {
        ops.push_back({OpKind::Measure, t, b, Gate::I, {a, bq}});
        t_max = std::max(t_max, t);
    }
    void cx(int t, int c, int g) {
        ops.push_back({OpKind::Unitary, t, Basis::Z, Gate::CX, {c, g}});
        t_max = std::max(t_max, t);
    }
    void swap(int t, int a, int b) {
        ops.push_back({OpKind::Unitary, t, Basis::Z, Gate::SWAP, {a, b}});
        t_max = std::max(t_max, t);
    }
    Circuit done(int T) {
        return finalize_circuit(n, T, std::move(ops), std::move(obs));
    }
};

void require(bool cond, const std::string &msg) {
    if (!cond) {
        throw std::invalid_argument(msg);
    }
}

// Brickwork of two-qubit ZZ measurements; odd rounds pair (0,1),(2,3),...,
// even rounds pair (1,2),(3,4),...
void brickwork_round(Builder &b, int t, int n) {
    int start = (t % 2 == 1) ? 0 : 1;
    for (int q = start; q + 1 < n; q += 2) {
        b.m2(t, Basis::Z, q, q + 1);
    }
}

Circuit rep_memory(int d, int T) {
    require(d >= 2, "rep_memory needs distance >= 2");
    require(T >= 1, "rep_memory needs duration >= 1");
    Builder b;
    b.n = d;
    for (int q = 0; q < d; q++) {
        b.r(0, Basis::Z, q);
    }
    for (int t = 1; t < T; t++) {
        brickwork_round(b, t, d);
    }
    for (int q = 0; q < d; q++) {
        b.m(T, Basis::Z, q);
    }
    SpacetimePauli xl(Grid{d, T});
    for (int q = 0; q < d; q++) {
        xl.set_x(q, 0, true);
    }
    b.obs.push_back({"XL", xl});
    return b.done(T);
}

Circuit rep_stability(int d, int T) {
    require(d >= 3 && d % 2 == 1, "rep_stability needs odd distance >= 3");
    require(T >= 2, "rep_stability needs duration >= 2");
    Builder b;
    b.n = d;
    for (int q = 0; q < d; q++) {
        b.r(0, Basis::X, q);
    }
    for (int t = 1; t < T; t++) {
        if (t % 2 == 1) {
            // Partial stabilizer on the left boundary.
            b.m(t, Basis::Z, 0);
            for (int q = 1; q + 1 < d; q += 2) {
                b.m2(t, Basis::Z, q, q + 1);
            }
        } else {
            for (int q = 0; q + 1 < d - 1; q += 2) {
                b.m2(t, Basis::Z, q, q + 1);
            }
            b.m(t, Basis::Z, d - 1);
        }
    }
    for (int q = 0; q < d; q++) {
        b.m(T, Basis::X, q);
    }
    // Undetected spanning timelike error: an X string down the middle qubit.
    SpacetimePauli tl(Grid{d, T});
    for (int layer = 0; layer < T; layer++) {
        tl.set_x(d / 2, layer, true);
    }
    b.obs.push_back({"TL", tl});
    return b.done(T);
}

// Standard ancilla compilation: data on even positions, ancillas on odd.
// Each round: CX(left data -> anc), CX(right data -> anc), M_Z(anc), R_Z(anc).
Circuit rep_standard(int d, int T) {
    require(d >= 2, "rep_standard needs distance >= 2");
    require(T == 4 * d - 1, "rep_standard duration must be 4d-1");
    int n = 2 * d - 1;
    Builder b;
    b.n = n;
    for (int q = 0; q < n; q++) {
        b.r(0, Basis::Z, q);
    }
    for (int r = 0; r < d; r++) {
        int base = 4 * r;
        for (int k = 0; k + 1 < d; k++) {
            b.cx(base + 1, 2 * k, 2 * k + 1);
            b.cx(base + 2, 2 * k + 2, 2 * k + 1);
        }
        if (r < d - 1) {
            for (int k = 0; k + 1 < d; k++) {
                b.m(base + 3, Basis::Z, 2 * k + 1);
                b.r(base + 4, Basis::Z, 2 * k + 1);
            }
        } else {
            for (int q = 0; q < n; q++) {
                b.m(base + 3, Basis::Z, q);
            }
        }
    }
    SpacetimePauli xl(Grid{n, T});
    for (int k = 0; k < d; k++) {
        xl.set_x(2 * k, 0, true);
    }
    b.obs.push_back({"XL", xl});
    return b.done(T);
}

// Wiggling compilation: the parity is teleported onto a data qubit each
// round, so data and ancilla roles exchange. Rounds alternate walking
// direction and the word returns to the even positions every two rounds; a
// boundary ZZ measurement and a boundary SWAP keep the check count at d-1.
// Round r runs [CX, CX, M] at 4r+1..4r+3 with the next round's ancilla
// resets at 4r+4.
Circuit rep_wiggling(int d, int T) {
    require(d >= 2, "rep_wiggling needs distance >= 2");
    require(T == 4 * d - 1, "rep_wiggling duration must be 4d-1");
    int n = 2 * d - 1;
    Builder b;
    b.n = n;
    for (int q = 0; q < n; q++) {
        b.r(0, Basis::Z, q);
    }
    for (int r = 0; r < d; r++) {
        int base = 4 * r;
        bool last = r == d - 1;
        if (r % 2 == 0) {
            // Rightward: trios (2k, 2k+1, 2k+2); the parity lands on the
            // right member and is measured there.
            for (int k = 0; k + 1 < d; k++) {
                b.cx(base + 1, 2 * k, 2 * k + 1);
                b.cx(base + 2, 2 * k + 1, 2 * k + 2);
                if (!last) {
                    b.m(base + 3, Basis::Z, 2 * k + 2);
                    b.r(base + 4, Basis::Z, 2 * k + 2);
                }
            }
        } else {
            // Leftward: trios (2k+1, 2k, 2k-1); the (0,1) check is native
            // and the right edge walks back via a swap with the idle corner.
            for (int k = 1; k + 1 < d; k++) {
                b.cx(base + 1, 2 * k + 1, 2 * k);
                b.cx(base + 2, 2 * k, 2 * k - 1);
                if (!last) {
                    b.m(base + 3, Basis::Z, 2 * k - 1);
                    b.r(base + 4, Basis::Z, 2 * k - 1);
                }
            }
            b.m2(base + 1, Basis::Z, 0, 1);
            b.swap(base + 2, n - 2, n - 1);
        }
        if (last) {
            for (int q = 0; q < n; q++) {
                b.m(base + 3, Basis::Z, q);
            }
        }
    }
    SpacetimePauli xl(Grid{n, T});
    for (int k = 0; k < d; k++) {
        xl.set_x(2 * k, 0, true);
    }
    b.obs.push_back({"XL", xl});
    return b.done(T);
}

// Two standard repetition patches with a transversal CNOT, either once at
// the midpoint round or inside every round.
Circuit rep_cnot(int d, int T, const std::string &schedule) {
    require(d >= 2, "rep_cnot needs distance >= 2");
    require(T == 4 * d - 1, "rep_cnot duration must be 4d-1");
    require(schedule == "midpoint" || schedule == "every_cell",
            "cnot_schedule must be midpoint or every_cell");
    int patch = 2 * d - 1;
    int n = 2 * patch;
    Builder b;
    b.n = n;
    auto qa = [&](int q) { return q; };
    auto qb = [&](int q) { return patch + q; };
    for (int q = 0; q < n; q++) {
        b.r(0, Basis::Z, q);
    }
    for (int r = 0; r < d; r++) {
        int base = 4 * r;
        for (int k = 0; k + 1 < d; k++) {
            b.cx(base + 1, qa(2 * k), qa(2 * k + 1));
            b.cx(base + 1, qb(2 * k), qb(2 * k + 1));
            b.cx(base + 2, qa(2 * k + 2), qa(2 * k + 1));
            b.cx(base + 2, qb(2 * k + 2), qb(2 * k + 1));
        }
        if (r < d - 1) {
            // Data qubits sit idle during the measure step, leaving room for
            // the transversal CNOT without lengthening the circuit.
            bool transversal = schedule == "every_cell" || r == (d - 1) / 2;
            for (int k = 0; k + 1 < d; k++) {
                b.m(base + 3, Basis::Z, qa(2 * k + 1));
                b.m(base + 3, Basis::Z, qb(2 * k + 1));
                b.r(base + 4, Basis::Z, qa(2 * k + 1));
                b.r(base + 4, Basis::Z, qb(2 * k + 1));
            }
            if (transversal) {
                for (int k = 0; k < d; k++) {
                    b.cx(base + 3, qa(2 * k), qb(2 * k));
                }
            }
        } else {
            for (int q = 0; q < n; q++) {
                b.m(base + 3, Basis::Z, q);
            }
        }
    }
    Grid grid{n, T};
    SpacetimePauli la(grid), lb(grid);
    for (int k = 0; k < d; k++) {
        la.set_x(qa(2 * k), 0, true);
        lb.set_x(qb(2 * k), 0, true);
    }
    b.obs.push_back({"XLA", la});
    b.obs.push_back({"XLB", lb});
    return b.done(T);
}

// Toric code on an L1 x L2 torus of vertices: cell (i,j) holds the plaquette
// ancilla Z, data A (horizontal edge east of the vertex), the star ancilla
// X, and data B (vertical edge north of the vertex).
struct ToricLayout {
    int l1, l2;
    int idx(int i, int j, int which) const {
        i = ((i % l1) + l1) % l1;
        j = ((j % l2) + l2) % l2;
        return ((j * l1) + i) * 4 + which;
    }
    int zanc(int i, int j) const { return idx(i, j, 0); }
    int a(int i, int j) const { return idx(i, j, 1); }
    int xanc(int i, int j) const { return idx(i, j, 2); }
    int b(int i, int j) const { return idx(i, j, 3); }
};

ToricLayout toric_layout(int d) {
    require(d >= 2 && d % 2 == 0, "toric builders need even distance >= 2");
    return ToricLayout{d, d / 2};
}

Circuit toric_standard(int d, int T) {
    ToricLayout L = toric_layout(d);
    require(T % 6 == 0 && T >= 6, "toric_standard duration must be a positive multiple of 6");
    int rounds = T / 6;
    int n = 4 * L.l1 * L.l2;
    Builder b;
    b.n = n;
    for (int j = 0; j < L.l2; j++) {
        for (int i = 0; i < L.l1; i++) {
            b.r(0, Basis::Z, L.a(i, j));
            b.r(0, Basis::Z, L.b(i, j));
            b.r(0, Basis::Z, L.zanc(i, j));
            b.r(0, Basis::X, L.xanc(i, j));
        }
    }
    for (int r = 0; r < rounds; r++) {
        int base = 6 * r;
        for (int j = 0; j < L.l2; j++) {
            for (int i = 0; i < L.l1; i++) {
                if (r > 0) {
                    b.r(base + 1, Basis::Z, L.zanc(i, j));
                    b.r(base + 1, Basis::X, L.xanc(i, j));
                }
                // Star V(i,j): CX(anc -> data), order N,E,W,S.
                b.cx(base + 2, L.xanc(i, j), L.b(i, j));
                b.cx(base + 3, L.xanc(i, j), L.a(i, j));
                b.cx(base + 4, L.xanc(i, j), L.a(i - 1, j));
                b.cx(base + 5, L.xanc(i, j), L.b(i, j - 1));
                // Plaquette F(i,j): CX(data -> anc), order S,W,E,N.
                b.cx(base + 2, L.a(i, j), L.zanc(i, j));
                b.cx(base + 3, L.b(i, j), L.zanc(i, j));
                b.cx(base + 4, L.b(i + 1, j), L.zanc(i, j));
                b.cx(base + 5, L.a(i, j + 1), L.zanc(i, j));
                b.m(base + 6, Basis::Z, L.zanc(i, j));
                b.m(base + 6, Basis::X, L.xanc(i, j));
            }
        }
    }
    for (int j = 0; j < L.l2; j++) {
        for (int i = 0; i < L.l1; i++) {
            b.m(T, Basis::Z, L.a(i, j));
            b.m(T, Basis::Z, L.b(i, j));
        }
    }
    // Horizontal logical: X along a row of vertical edges.
    SpacetimePauli xl(Grid{n, T});
    for (int i = 0; i < L.l1; i++) {
        xl.set_x(L.b(i, 0), 0, true);
    }
    b.obs.push_back({"XL", xl});
    return b.done(T);
}

// Wiggling toric compilation: each check teleports its parity onto one of
// its data qubits (measured there), exchanging ancilla and data roles; the
// second half round mirrors the first with roles swapped, giving a 12-step
// cell period.
Circuit toric_wiggling(int d, int T) {
    ToricLayout L = toric_layout(d);
    require(T % 12 == 0 && T >= 12, "toric_wiggling duration must be a positive multiple of 12");
    int rounds = T / 12;
    int n = 4 * L.l1 * L.l2;
    Builder b;
    b.n = n;
    for (int j = 0; j < L.l2; j++) {
        for (int i = 0; i < L.l1; i++) {
            b.r(0, Basis::Z, L.a(i, j));
            b.r(0, Basis::Z, L.b(i, j));
            b.r(0, Basis::Z, L.zanc(i, j));
            b.r(0, Basis::X, L.xanc(i, j));
        }
    }
    for (int r = 0; r < rounds; r++) {
        int h1 = 12 * r;       // first half: word on A/B
        int h2 = 12 * r + 6;   // second half: word on Zanc/Xanc
        for (int j = 0; j < L.l2; j++) {
            for (int i = 0; i < L.l1; i++) {
                if (r > 0) {
                    b.r(h1 + 1, Basis::Z, L.zanc(i, j));
                    b.r(h1 + 1, Basis::X, L.xanc(i, j));
                }
                // Plaquette: collect N,W,E then teleport onto S = A(i,j).
                b.cx(h1 + 2, L.a(i, j + 1), L.zanc(i, j));
                b.cx(h1 + 3, L.b(i, j), L.zanc(i, j));
                b.cx(h1 + 4, L.b(i + 1, j), L.zanc(i, j));
                b.cx(h1 + 5, L.zanc(i, j), L.a(i, j));
                // Star: collect S,E,W then teleport from N = B(i,j).
                b.cx(h1 + 2, L.xanc(i, j), L.b(i, j - 1));
                b.cx(h1 + 3, L.xanc(i, j), L.a(i, j));
                b.cx(h1 + 4, L.xanc(i, j), L.a(i - 1, j));
                b.cx(h1 + 5, L.b(i, j), L.xanc(i, j));
                b.m(h1 + 6, Basis::Z, L.a(i, j));
                b.m(h1 + 6, Basis::X, L.b(i, j));

                // Second half: edges live on Zanc (horizontal) and Xanc
                // (vertical); A and B serve as the ancillas, mirroring the
                // first half.
                b.r(h2 + 1, Basis::Z, L.a(i, j));
                b.r(h2 + 1, Basis::X, L.b(i, j));
                b.cx(h2 + 2, L.zanc(i, j + 1), L.a(i, j));
                b.cx(h2 + 3, L.xanc(i, j), L.a(i, j));
                b.cx(h2 + 4, L.xanc(i + 1, j), L.a(i, j));
                b.cx(h2 + 5, L.a(i, j), L.zanc(i, j));
                b.cx(h2 + 2, L.b(i, j), L.xanc(i, j - 1));
                b.cx(h2 + 3, L.b(i, j), L.zanc(i, j));
                b.cx(h2 + 4, L.b(i, j), L.zanc(i - 1, j));
                b.cx(h2 + 5, L.xanc(i, j), L.b(i, j));
                b.m(h2 + 6, Basis::Z, L.zanc(i, j));
                b.m(h2 + 6, Basis::X, L.xanc(i, j));
            }
        }
    }
    for (int j = 0; j < L.l2; j++) {
        for (int i = 0; i < L.l1; i++) {
            b.m(T, Basis::Z, L.a(i, j));
            b.m(T, Basis::Z, L.b(i, j));
        }
    }
    SpacetimePauli xl(Grid{n, T});
    for (int i = 0; i < L.l1; i++) {
        xl.set_x(L.b(i, 0), 0, true);
    }
    b.obs.push_back({"XL", xl});
    return b.done(T);
}

}  // namespace

std::vector<std::string> builtin_names() {
    return {"rep_memory", "rep_stability", "rep_standard", "rep_wiggling",
            "rep_cnot",   "toric_standard", "toric_wiggling"};
}

Circuit builtin_circuit(const std::string &name, const BuiltinParams &params) {
    int d = params.distance;
    if (name == "rep_memory") {
        return rep_memory(d, params.duration.value_or(2 * d + 1));
    }
    if (name == "rep_stability") {
        return rep_stability(d, params.duration.value_or(2 * d + 1));
    }
    if (name == "rep_standard") {
        return rep_standard(d, params.duration.value_or(4 * d - 1));
    }
    if (name == "rep_wiggling") {
        return rep_wiggling(d, params.duration.value_or(4 * d - 1));
    }
    if (name == "rep_cnot") {
        return rep_cnot(d, params.duration.value_or(4 * d - 1), params.cnot_schedule);
    }
    if (name == "toric_standard") {
        return toric_standard(d, params.duration.value_or(6 * d));
    }
    if (name == "toric_wiggling") {
        return toric_wiggling(d, params.duration.value_or(6 * d));
    }
    throw std::invalid_argument("unknown builtin circuit " + name);
}

}  // namespace qcsm
