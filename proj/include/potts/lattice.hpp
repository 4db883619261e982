#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace potts {

using Spin = std::uint8_t;  // labels 1..q

struct Vertex {
  int row = 0;
  int col = 0;
  friend bool operator==(const Vertex&, const Vertex&) = default;
};

// K x L torus, K rows and L columns. By convention L >= K; inputs with
// K > L are normalized by swapping (flagged so reports can say so).
struct LatticeGeom {
  int K = 0;
  int L = 0;
  bool normalized = false;  // true when the constructor swapped K and L

  LatticeGeom() = default;
  LatticeGeom(int rows, int cols) {
    if (rows < 3 || cols < 3)
      throw std::invalid_argument("LatticeGeom: need K,L >= 3 (torus with parallel edges otherwise)");
    K = rows;
    L = cols;
    if (K > L) {
      std::swap(K, L);
      normalized = true;
    }
  }

  int sites() const { return K * L; }
  int edges() const { return 2 * K * L; }

  int index(int r, int c) const { return r * L + c; }
  int index(Vertex v) const { return v.row * L + v.col; }
  Vertex vertex(int idx) const { return {idx / L, idx % L}; }

  bool in_range(Vertex v) const {
    return v.row >= 0 && v.row < K && v.col >= 0 && v.col < L;
  }

  int up(int idx) const { return idx < L ? idx + (K - 1) * L : idx - L; }
  int down(int idx) const { return idx >= (K - 1) * L ? idx - (K - 1) * L : idx + L; }
  int left(int idx) const { return idx % L == 0 ? idx + L - 1 : idx - 1; }
  int right(int idx) const { return idx % L == L - 1 ? idx - L + 1 : idx + 1; }

  std::array<int, 4> neighbor_indices(int idx) const {
    return {up(idx), down(idx), left(idx), right(idx)};
  }

  friend bool operator==(const LatticeGeom& a, const LatticeGeom& b) {
    return a.K == b.K && a.L == b.L;
  }
};

// wrap-around neighbors; order up, down, left, right
inline std::array<Vertex, 4> neighbors(const LatticeGeom& g, Vertex v) {
  if (!g.in_range(v)) throw std::out_of_range("neighbors: vertex out of range");
  auto wrap = [](int x, int n) { return x < 0 ? x + n : (x >= n ? x - n : x); };
  return {Vertex{wrap(v.row - 1, g.K), v.col}, Vertex{wrap(v.row + 1, g.K), v.col},
          Vertex{v.row, wrap(v.col - 1, g.L)}, Vertex{v.row, wrap(v.col + 1, g.L)}};
}

struct Move {
  Vertex vertex;
  Spin new_spin = 0;
};

// Immutable spin assignment. Spins live in 1..q, stored row-major.
class SpinConfig {
 public:
  SpinConfig() = default;
  SpinConfig(LatticeGeom g, int q, std::vector<Spin> spins)
      : geom_(g), q_(q), spins_(std::move(spins)) {
    if ((int)spins_.size() != g.sites())
      throw std::invalid_argument("SpinConfig: size mismatch");
    for (Spin s : spins_)
      if (s < 1 || s > q) throw std::invalid_argument("SpinConfig: spin out of 1..q");
  }

  const LatticeGeom& geom() const { return geom_; }
  int q() const { return q_; }
  Spin at(int idx) const { return spins_[idx]; }
  Spin at(int r, int c) const { return spins_[geom_.index(r, c)]; }
  Spin at(Vertex v) const { return spins_[geom_.index(v)]; }
  const std::vector<Spin>& spins() const { return spins_; }

  friend bool operator==(const SpinConfig& a, const SpinConfig& b) {
    return a.geom_ == b.geom_ && a.q_ == b.q_ && a.spins_ == b.spins_;
  }

 private:
  LatticeGeom geom_;
  int q_ = 0;
  std::vector<Spin> spins_;
};

inline SpinConfig monochrome(LatticeGeom g, int q, Spin s) {
  if (s < 1 || (int)s > q) throw std::invalid_argument("monochrome: spin out of range");
  return SpinConfig(g, q, std::vector<Spin>(g.sites(), s));
}

// A no-op move is rejected here, not downstream.
inline Move make_move(const SpinConfig& sigma, Vertex v, Spin s) {
  if (!sigma.geom().in_range(v)) throw std::out_of_range("make_move: vertex out of range");
  if (s < 1 || (int)s > sigma.q()) throw std::invalid_argument("make_move: spin out of range");
  if (sigma.at(v) == s) throw std::invalid_argument("make_move: no-op move");
  return Move{v, s};
}

inline SpinConfig apply_move(const SpinConfig& sigma, const Move& m) {
  if (!sigma.geom().in_range(m.vertex)) throw std::out_of_range("apply_move: vertex out of range");
  if (m.new_spin < 1 || (int)m.new_spin > sigma.q())
    throw std::invalid_argument("apply_move: spin out of range");
  if (sigma.at(m.vertex) == m.new_spin) throw std::invalid_argument("apply_move: no-op move");
  std::vector<Spin> s = sigma.spins();
  s[sigma.geom().index(m.vertex)] = m.new_spin;
  return SpinConfig(sigma.geom(), sigma.q(), std::move(s));
}

inline int hamming(const SpinConfig& a, const SpinConfig& b) {
  int d = 0;
  for (size_t i = 0; i < a.spins().size(); ++i) d += a.spins()[i] != b.spins()[i];
  return d;
}

// Canonical base-q integer encoding, little-endian by vertex index.
// Fits in u64 only for small lattices; that is all the oracle needs.
inline std::uint64_t encode(const SpinConfig& sigma) {
  std::uint64_t code = 0;
  const auto& sp = sigma.spins();
  const std::uint64_t q = sigma.q();
  for (size_t i = sp.size(); i-- > 0;) {
    if (code > (UINT64_MAX - (sp[i] - 1)) / q)
      throw std::overflow_error("encode: q^(K*L) exceeds 64 bits");
    code = code * q + (sp[i] - 1);
  }
  return code;
}

inline SpinConfig decode(std::uint64_t code, LatticeGeom g, int q) {
  std::vector<Spin> sp(g.sites());
  for (int i = 0; i < g.sites(); ++i) {
    sp[i] = Spin(code % q + 1);
    code /= q;
  }
  if (code != 0) throw std::invalid_argument("decode: code out of range for this lattice");
  return SpinConfig(g, q, std::move(sp));
}

// Byte-string key for hashing big configurations (canonical order).
inline std::string state_key(const std::vector<Spin>& spins) {
  return std::string(reinterpret_cast<const char*>(spins.data()), spins.size());
}
inline std::string state_key(const SpinConfig& sigma) { return state_key(sigma.spins()); }

// Canonical encoding order without materializing the big integer:
// compare most significant vertex (highest index) first.
inline bool encoding_less(const std::vector<Spin>& a, const std::vector<Spin>& b) {
  for (size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

}  // namespace potts
