#include "snn/hash.hpp"

#include <bit>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace snn {

HashMatrix HashMatrix::random(int rows, int cols, std::mt19937_64& rng) {
  if (rows < 0 || cols < 1 || cols > 64) throw std::invalid_argument("hash shape out of range");
  HashMatrix h;
  h.rows = rows;
  h.cols = cols;
  const std::uint64_t mask = cols == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << cols) - 1;
  for (int j = 0; j < rows; ++j) h.row.push_back(rng() & mask);
  return h;
}

std::uint64_t HashMatrix::apply(std::uint64_t x) const {
  std::uint64_t y = 0;
  for (int j = 0; j < rows; ++j) y |= static_cast<std::uint64_t>(std::popcount(row[j] & x) & 1) << j;
  return y;
}

std::string HashMatrix::serialize() const {
  std::ostringstream os;
  os << "H " << rows << ' ' << cols;
  for (auto r : row) os << ' ' << std::hex << r << std::dec;
  return os.str();
}

HashMatrix HashMatrix::parse(const std::string& line) {
  std::istringstream is(line);
  std::string tag;
  HashMatrix h;
  if (!(is >> tag >> h.rows >> h.cols) || tag != "H" || h.rows < 0 || h.cols < 1 || h.cols > 64)
    throw std::runtime_error("malformed hash line");
  for (int j = 0; j < h.rows; ++j) {
    std::uint64_t r;
    if (!(is >> std::hex >> r)) throw std::runtime_error("hash line has too few rows");
    h.row.push_back(r);
  }
  return h;
}

int hash_pot_width(int cols) { return bits_for(static_cast<std::uint64_t>(cols)); }

int hash_latency(int cols) { return pot_latency(hash_pot_width(cols)); }

HashNet build_hash_net(Network& net, std::span<const NeuronId> inputs, const HashMatrix& h, std::string_view label) {
  if (static_cast<int>(inputs.size()) != h.cols) throw std::invalid_argument("hash input width mismatch");
  HashNet hn;
  const int width = hash_pot_width(h.cols);
  for (int j = 0; j < h.rows; ++j) {
    std::vector<Term> terms;
    for (int k = 0; k < h.cols; ++k)
      if ((h.row[j] >> k) & 1) terms.push_back({inputs[k], 1});
    Pot p = build_pot(net, terms, 0, width, true, label);
    hn.out.push_back(p.out[0]);
    hn.out_inh.push_back(p.out_inh[0]);
    hn.copies.insert(hn.copies.end(), p.copies.begin(), p.copies.end());
    hn.pots.push_back(std::move(p));
  }
  return hn;
}

}  // namespace snn
