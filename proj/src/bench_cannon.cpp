// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
//
// Cannon's algorithm on a p x p grid of PEs (p = 2 or 3), multiplying two
// (2p x 2p) matrices of small integers held as 2x2 blocks packed into one
// 64-bit token (four 16-bit lanes, row-major). The builder pre-applies the
// initial skew (A shifted left by its row, B shifted up by its column) and
// bakes each PE's starting blocks into scalars, so the behavior is a pure
// function of its scalars: multiply-accumulate, rotate A left and B up,
// repeat p times.
//
// Every PE must read blocks produced by its grid neighbors in the same
// round, which is exactly the feedback pattern a one-shot sequential
// schedule cannot satisfy: the first PE blocks on a neighbor that has not
// run yet.
#include <algorithm>
#include <array>
#include <memory>
#include <random>
#include <stdexcept>

#include "weft/bench.hpp"

namespace weft {

namespace {

using Block = std::array<std::uint64_t, 4>;  // e00 e01 e10 e11

std::uint64_t pack_block(const Block& b) {
  return b[0] | (b[1] << 16) | (b[2] << 32) | (b[3] << 48);
}

Block unpack_block(std::uint64_t v) {
  return {v & 0xFFFF, (v >> 16) & 0xFFFF, (v >> 32) & 0xFFFF,
          (v >> 48) & 0xFFFF};
}

// c += a * b on 2x2 blocks. Entries stay below 2^16: inputs are < 8, so a
// full dot product over 2p <= 6 terms is at most 6 * 49.
void mac_block(Block& c, const Block& a, const Block& b) {
  c[0] += a[0] * b[0] + a[1] * b[2];
  c[1] += a[0] * b[1] + a[1] * b[3];
  c[2] += a[2] * b[0] + a[3] * b[2];
  c[3] += a[2] * b[1] + a[3] * b[3];
}

BehaviorFactory make_cannon_pe(CollectorPtr col) {
  return coro_behavior([col](TaskContext& ctx) -> BehaviorCoro {
    const int p = static_cast<int>(ctx.scalar("p"));
    Block a = unpack_block(ctx.scalar("a0"));
    Block b = unpack_block(ctx.scalar("b0"));
    OutStream a_out = ctx.out("a_out");
    OutStream b_out = ctx.out("b_out");
    InStream a_in = ctx.in("a_in");
    InStream b_in = ctx.in("b_in");

    Block c = {0, 0, 0, 0};
    for (int round = 0; round < p; ++round) {
      mac_block(c, a, b);
      if (round + 1 == p) break;
      co_await a_out.write(Token::data(pack_block(a)));
      co_await b_out.write(Token::data(pack_block(b)));
      Token ta = co_await a_in.read();
      Token tb = co_await b_in.read();
      if (ta.is_eot || tb.is_eot)
        throw std::runtime_error("rotation ended early");
      a = unpack_block(ta.payload);
      b = unpack_block(tb.payload);
    }
    co_await a_out.close();
    co_await b_out.close();
    Token ea = co_await a_in.read();
    Token eb = co_await b_in.read();
    if (!ea.is_eot || !eb.is_eot)
      throw std::runtime_error("expected end of transaction after rotations");
    if (col) col->push(ctx.instance_path(), pack_block(c));
  });
}

class CannonBench final : public Bench {
 public:
  explicit CannonBench(const BenchParams& params) : Bench("cannon") {
    p_ = params.size > 0 ? params.size : 2;
    seed_ = params.seed;
    if (p_ != 2 && p_ != 3)
      throw BadSizeError("cannon grid must be 2 or 3 PEs per side");
    build();
  }

 private:
  // Row-major 2x2 block of an n x n matrix at block coordinates (bi, bj).
  static Block block_at(const std::vector<std::uint64_t>& m, int n, int bi,
                        int bj) {
    const int r = 2 * bi, c = 2 * bj;
    return {m[r * n + c], m[r * n + c + 1], m[(r + 1) * n + c],
            m[(r + 1) * n + c + 1]};
  }

  void build() {
    const int n = 2 * p_;
    std::mt19937_64 rng(seed_ * 0x9E3779B97F4A7C15ULL + 0xC4);
    std::vector<std::uint64_t> a(n * n), b(n * n);
    for (auto& v : a) v = rng() % 8;
    for (auto& v : b) v = rng() % 8;

    // Independent dense product pins the expected output.
    std::vector<std::uint64_t> c(n * n, 0);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) c[i * n + j] += a[i * n + k] * b[k * n + j];
    expected_.assign(p_ * p_, 0);
    for (int i = 0; i < p_; ++i)
      for (int j = 0; j < p_; ++j)
        expected_[i * p_ + j] = pack_block(block_at(c, n, i, j));

    graph_.add_token_type({"block", 64});

    TaskDefinition pe;
    pe.name = "PE";
    pe.kind = TaskKind::Leaf;
    pe.ports = {{"a_in", PortDirection::InputStream, "block"},
                {"b_in", PortDirection::InputStream, "block"},
                {"a_out", PortDirection::OutputStream, "block"},
                {"b_out", PortDirection::OutputStream, "block"},
                {"p", PortDirection::Scalar, ""},
                {"a0", PortDirection::Scalar, ""},
                {"b0", PortDirection::Scalar, ""}};
    pe.behavior_key = "cannon-pe";
    pe.behavior = make_cannon_pe(collector_);
    graph_.add_definition(std::move(pe));

    TaskDefinition top;
    top.name = "cannon";
    top.kind = TaskKind::Parent;
    auto ch_a = [&](int i, int j) {
      return "a_" + std::to_string(i) + "_" + std::to_string(j);
    };
    auto ch_b = [&](int i, int j) {
      return "b_" + std::to_string(i) + "_" + std::to_string(j);
    };
    // Channel a_i_j carries PE(i,j)'s A block one step left; b_i_j carries
    // its B block one step up. Capacity p+1: a PE emits at most p-1 blocks
    // plus the end-of-transaction marker, so writers never stall.
    for (int i = 0; i < p_; ++i)
      for (int j = 0; j < p_; ++j) {
        top.local_channels.push_back({ch_a(i, j), "block", p_ + 1});
        top.local_channels.push_back({ch_b(i, j), "block", p_ + 1});
      }
    for (int i = 0; i < p_; ++i)
      for (int j = 0; j < p_; ++j) {
        ChildDecl child;
        child.definition = "PE";
        child.bindings = {
            {"a_out", Binding::channel(ch_a(i, j))},
            {"b_out", Binding::channel(ch_b(i, j))},
            // A rotates left: our next block comes from the right neighbor.
            {"a_in", Binding::channel(ch_a(i, (j + 1) % p_))},
            // B rotates up: our next block comes from the neighbor below.
            {"b_in", Binding::channel(ch_b((i + 1) % p_, j))},
            {"p", Binding::scalar(std::uint64_t(p_))},
            {"a0",
             Binding::scalar(pack_block(block_at(a, n, i, (j + i) % p_)))},
            {"b0",
             Binding::scalar(pack_block(block_at(b, n, (i + j) % p_, j)))}};
        top.children.push_back(std::move(child));
      }
    graph_.add_definition(std::move(top));
    graph_.set_top("cannon");
  }

  BenchResult check(const RunReport& report) override {
    for (const auto& ch : report.channels)
      if (ch.stats.eot_written != 1 || ch.stats.eot_read != 1)
        return fail(ch.path + ": expected exactly one end-of-transaction");
    if (std::string issue = channel_hygiene_issue(report); !issue.empty())
      return fail(issue);

    for (int i = 0; i < p_ * p_; ++i) {
      std::vector<std::uint64_t> got =
          collector_->take("cannon/PE." + std::to_string(i));
      if (got.size() != 1)
        return fail("PE " + std::to_string(i) + " reported " +
                    std::to_string(got.size()) + " blocks, expected 1");
      if (got[0] != expected_[i])
        return fail("PE " + std::to_string(i) + " block " +
                    std::to_string(got[0]) + " != expected " +
                    std::to_string(expected_[i]));
    }
    return pass("product of " + std::to_string(2 * p_) + "x" +
                std::to_string(2 * p_) + " matrices matches the dense oracle");
  }

  int p_ = 2;
  std::uint64_t seed_ = 0;
  std::vector<std::uint64_t> expected_;  // packed C block per PE, row-major
};

}  // namespace

void detail::register_cannon(
    std::vector<BenchEntry>& benches,
    std::map<std::string, CollectedFactory>& behaviors) {
  benches.push_back(
      {"cannon",
       "Cannon's blocked matrix multiply on a PE grid with rotating operands",
       [](const BenchParams& p) { return std::make_unique<CannonBench>(p); }});
  behaviors["cannon-pe"] = [](CollectorPtr c) {
    return make_cannon_pe(std::move(c));
  };
}

}  // namespace weft
