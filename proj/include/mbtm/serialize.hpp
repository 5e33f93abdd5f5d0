#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mbtm/csia.hpp"
#include "mbtm/tm.hpp"

namespace mbtm::serialize {

// Binary model layout, all integers little-endian:
//   magic "TMPM", version u16
//   config: num_clauses u32, T f64, s f64, ta_state_bits u32,
//           weighted u8, boost u8, seed u64, feature_count u32
//   per clause: polarity i8, weight u32, TA states u32[2F]
//   bank flag u8; if 1: ia_state_bits u32, d f64, cell count u64,
//           per cell: clause u32, literal u32, state u32, phase u8

inline constexpr char kMagic[4] = {'T', 'M', 'P', 'M'};
inline constexpr std::uint16_t kVersion = 1;

namespace detail {

inline void put_u8(std::string& out, std::uint8_t v) {
  out.push_back(static_cast<char>(v));
}

inline void put_u16(std::string& out, std::uint16_t v) {
  for (int i = 0; i < 2; ++i) put_u8(out, (v >> (8 * i)) & 0xff);
}

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) put_u8(out, (v >> (8 * i)) & 0xff);
}

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) put_u8(out, (v >> (8 * i)) & 0xff);
}

inline void put_f64(std::string& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

inline void put_state_u32(std::string& out, std::int64_t state) {
  if (state < 0 || state > 0xffffffffLL)
    throw std::runtime_error(
        "automaton state does not fit the 32-bit model format");
  put_u32(out, static_cast<std::uint32_t>(state));
}

struct Reader {
  std::string_view data;
  std::size_t pos = 0;

  void require(std::size_t n) const {
    if (pos + n > data.size())
      throw std::runtime_error("truncated model data");
  }
  std::uint8_t u8() {
    require(1);
    return static_cast<std::uint8_t>(data[pos++]);
  }
  std::uint16_t u16() {
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= std::uint16_t{u8()} << (8 * i);
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{u8()} << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{u8()} << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
};

}  // namespace detail

inline std::string save_model(const tm::TMModel& model,
                              const csia::CsiaBank* bank = nullptr) {
  using namespace detail;
  std::string out;
  out.append(kMagic, 4);
  put_u16(out, kVersion);

  const auto& cfg = model.config();
  put_u32(out, cfg.num_clauses);
  put_f64(out, cfg.T);
  put_f64(out, cfg.s);
  put_u32(out, cfg.ta_state_bits);
  put_u8(out, cfg.weighted ? 1 : 0);
  put_u8(out, cfg.boost_true_positive ? 1 : 0);
  put_u64(out, cfg.seed);
  put_u32(out, model.feature_count());

  for (const auto& c : model.clauses()) {
    put_u8(out, static_cast<std::uint8_t>(c.polarity));
    put_u32(out, c.weight);
    for (const std::int64_t s : c.ta) put_state_u32(out, s);
  }

  if (!bank) {
    put_u8(out, 0);
    return out;
  }
  put_u8(out, 1);
  put_u32(out, bank->config().ia_state_bits);
  put_f64(out, bank->config().d);
  put_u64(out, bank->size());
  for (std::size_t j = 0; j < bank->clause_count(); ++j)
    bank->for_each_cell(j, [&](std::size_t k, const csia::CsiaCell& cell) {
      put_u32(out, static_cast<std::uint32_t>(j));
      put_u32(out, static_cast<std::uint32_t>(k));
      put_state_u32(out, cell.state);
      put_u8(out, static_cast<std::uint8_t>(cell.phase));
    });
  return out;
}

struct LoadedModel {
  tm::TMModel model;
  std::optional<csia::CsiaBank> bank;
};

inline LoadedModel load_model(std::string_view bytes) {
  using namespace detail;
  Reader r{bytes};
  r.require(4);
  if (bytes.substr(0, 4) != std::string_view(kMagic, 4))
    throw std::runtime_error("not a model file (bad magic)");
  r.pos = 4;
  if (r.u16() != kVersion)
    throw std::runtime_error("unsupported model format version");

  tm::TMConfig cfg;
  cfg.num_clauses = r.u32();
  cfg.T = r.f64();
  cfg.s = r.f64();
  cfg.ta_state_bits = r.u32();
  cfg.weighted = r.u8() != 0;
  cfg.boost_true_positive = r.u8() != 0;
  cfg.seed = r.u64();
  const std::uint32_t feature_count = r.u32();

  tm::TMModel model = [&] {
    try {
      return tm::TMModel(cfg, feature_count);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(std::string("corrupt model config: ") +
                               e.what());
    }
  }();

  for (std::size_t j = 0; j < model.clauses().size(); ++j) {
    auto& c = model.clauses()[j];
    const auto pol = static_cast<std::int8_t>(r.u8());
    if (pol != 1 && pol != -1)
      throw std::runtime_error("corrupt model: bad clause polarity");
    c.polarity = pol;
    const std::uint32_t w = r.u32();
    if (w == 0) throw std::runtime_error("corrupt model: zero clause weight");
    c.weight = w;
    for (std::size_t k = 0; k < model.literal_count(); ++k) {
      const std::uint32_t s = r.u32();
      if (s < 1 || std::int64_t{s} > model.max_state())
        throw std::runtime_error("corrupt model: TA state out of range");
      model.set_ta_state(j, k, s);
    }
  }

  LoadedModel out{std::move(model), std::nullopt};
  const std::uint8_t bank_flag = r.u8();
  if (bank_flag > 1)
    throw std::runtime_error("corrupt model: bad bank flag");
  if (bank_flag == 1) {
    csia::CsiaConfig bcfg;
    bcfg.ia_state_bits = r.u32();
    bcfg.d = r.f64();
    csia::CsiaBank bank = [&] {
      try {
        return csia::CsiaBank(bcfg,
                              static_cast<std::uint32_t>(
                                  out.model.clauses().size()),
                              out.model.literal_count());
      } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("corrupt bank config: ") +
                                 e.what());
      }
    }();
    const std::uint64_t count = r.u64();
    for (std::uint64_t i = 0; i < count; ++i) {
      const std::uint32_t j = r.u32();
      const std::uint32_t k = r.u32();
      const std::uint32_t state = r.u32();
      const std::uint8_t phase = r.u8();
      if (j >= out.model.clauses().size() || k >= out.model.literal_count())
        throw std::runtime_error("corrupt bank: cell index out of range");
      if (!out.model.clauses()[j].includes(k))
        throw std::runtime_error("corrupt bank: cell for excluded literal");
      if (bank.has_cell(j, k))
        throw std::runtime_error("corrupt bank: duplicate cell");
      if (state < 1 || std::int64_t{state} > csia::num_states(bcfg))
        throw std::runtime_error("corrupt bank: state out of range");
      if (phase > 1) throw std::runtime_error("corrupt bank: bad phase");
      bank.create_cell(j, k);
      auto& cell = bank.cell(j, k);
      cell.state = state;
      cell.phase = static_cast<csia::Phase>(phase);
    }
    out.bank = std::move(bank);
  }
  if (r.pos != bytes.size())
    throw std::runtime_error("trailing bytes after model data");
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) throw std::runtime_error("read failed: " + path.string());
  return data;
}

/// Writes via a temp file in the same directory, then renames over the
/// destination, so readers never observe a half-written file.
inline void write_file_atomic(const std::filesystem::path& path,
                              std::string_view bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open file: " + tmp.string());
    out.write(bytes.data(),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace mbtm::serialize
