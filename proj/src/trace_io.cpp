#include "wtgs/trace_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include "wtgs/errors.hpp"

namespace wtgs {

namespace {

constexpr char k_magic[8] = {'W', 'T', 'G', 'S', 'T', 'R', 'C', '1'};

std::vector<std::uint8_t> pack_bits(const std::uint8_t* gamma, int P) {
  std::vector<std::uint8_t> bytes((P + 7) / 8, 0);
  for (int j = 0; j < P; ++j)
    if (gamma[j]) bytes[j / 8] |= static_cast<std::uint8_t>(1u << (j % 8));
  return bytes;
}

void unpack_bits(const std::vector<std::uint8_t>& bytes, std::uint8_t* gamma, int P) {
  for (int j = 0; j < P; ++j) gamma[j] = (bytes[j / 8] >> (j % 8)) & 1u;
}

template <typename T>
void put(std::ofstream& f, const T& v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(T));  // little-endian hosts
}

template <typename T>
void get(std::ifstream& f, T& v) {
  f.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!f) throw DataError("truncated trace journal");
}

}  // namespace

std::string pack_gamma_hex(const std::uint8_t* gamma, int P) {
  static const char* digits = "0123456789abcdef";
  std::string out((P + 3) / 4, '0');
  for (int j = 0; j < P; ++j)
    if (gamma[j]) {
      const int k = j / 4;
      int nib = out[k] <= '9' ? out[k] - '0' : out[k] - 'a' + 10;
      nib |= 1 << (j % 4);
      out[k] = digits[nib];
    }
  return out;
}

GammaVec unpack_gamma_hex(const std::string& hex, int P) {
  if (hex.size() != static_cast<std::size_t>((P + 3) / 4))
    throw DataError("hex-packed state has the wrong length");
  GammaVec out(P, 0);
  for (int j = 0; j < P; ++j) {
    const char c = hex[j / 4];
    const int nib = c <= '9' ? c - '0' : c - 'a' + 10;
    out[j] = (nib >> (j % 4)) & 1;
  }
  return out;
}

void write_trace_csv(const SamplerTrace& trace, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot open for writing: " + path);
  f << "# P=" << trace.P << " T=" << trace.T << " t_burn=" << trace.t_burn
    << " gamma0=" << pack_gamma_hex(trace.gamma0.data(), trace.P) << "\n";
  f << "t,q,flipped,rho_tilde_log,gamma_hex\n";
  char buf[64];
  for (long long t = 1; t <= trace.T; ++t) {
    std::snprintf(buf, sizeof(buf), "%lld,%d,%d,%.17g,", t,
                  static_cast<int>(trace.q[t - 1]), trace.flipped[t - 1],
                  trace.rho_tilde_log[t - 1]);
    f << buf << pack_gamma_hex(trace.gamma_at(t), trace.P) << "\n";
  }
}

void write_trace_journal(const SamplerTrace& trace, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open for writing: " + path);
  f.write(k_magic, sizeof(k_magic));
  put(f, static_cast<std::uint32_t>(trace.P));
  put(f, static_cast<std::uint64_t>(trace.T));
  put(f, static_cast<std::uint64_t>(trace.t_burn));
  const auto g0 = pack_bits(trace.gamma0.data(), trace.P);
  f.write(reinterpret_cast<const char*>(g0.data()), g0.size());
  for (long long t = 1; t <= trace.T; ++t) {
    put(f, trace.q[t - 1]);
    put(f, trace.flipped[t - 1]);
    put(f, trace.rho_tilde_log[t - 1]);
    const auto bytes = pack_bits(trace.gamma_at(t), trace.P);
    f.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  }
}

SamplerTrace read_trace_journal(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open trace journal: " + path);
  char magic[8];
  f.read(magic, sizeof(magic));
  if (!f || std::memcmp(magic, k_magic, sizeof(magic)) != 0)
    throw DataError("not a trace journal: " + path);

  SamplerTrace tr;
  std::uint32_t P;
  std::uint64_t T, t_burn;
  get(f, P);
  get(f, T);
  get(f, t_burn);
  tr.P = static_cast<int>(P);
  tr.T = static_cast<long long>(T);
  tr.t_burn = static_cast<long long>(t_burn);

  const std::size_t nbytes = (tr.P + 7) / 8;
  std::vector<std::uint8_t> bytes(nbytes);
  f.read(reinterpret_cast<char*>(bytes.data()), nbytes);
  if (!f) throw DataError("truncated trace journal");
  tr.gamma0.resize(tr.P);
  unpack_bits(bytes, tr.gamma0.data(), tr.P);

  tr.gamma.resize(static_cast<std::size_t>(tr.T) * tr.P);
  tr.rho_tilde_log.resize(tr.T);
  tr.q.resize(tr.T);
  tr.flipped.resize(tr.T);
  tr.cond_pips.resize(tr.T);
  for (long long t = 1; t <= tr.T; ++t) {
    get(f, tr.q[t - 1]);
    get(f, tr.flipped[t - 1]);
    get(f, tr.rho_tilde_log[t - 1]);
    f.read(reinterpret_cast<char*>(bytes.data()), nbytes);
    if (!f) throw DataError("truncated trace journal");
    unpack_bits(bytes, tr.gamma.data() + static_cast<std::size_t>(t - 1) * tr.P, tr.P);
    if (tr.q[t - 1]) ++tr.active_count;
  }
  return tr;
}

}  // namespace wtgs
