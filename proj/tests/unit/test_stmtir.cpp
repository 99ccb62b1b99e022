#include <deque>
#include <map>

#include "common.hpp"
#include "doctest.h"
#include "pcfg/stmtir.hpp"
#include "stmt_gen.hpp"

using namespace pcfg;

namespace {

Stmt other(std::uint32_t p = 0) { return {StmtKind::Other, p, {}, {}}; }
Stmt checkpoint(std::uint32_t p = 0) { return {StmtKind::Checkpoint, p, {}, {}}; }
Stmt call(std::uint32_t p = 0) { return {StmtKind::Call, p, {}, {}}; }
Stmt cond(std::vector<Stmt> thn, std::vector<Stmt> els, std::uint32_t p = 0) {
  return {StmtKind::If, p, std::move(thn), std::move(els)};
}

std::vector<Stmt> fig6a() {
  return {other(), checkpoint(), other(), cond({other()}, {other()}), other(),
          cond({other(), cond({other()}, {call()}), other()}, {other()}), other()};
}

bool all_reachable(const Decomposition& d) {
  std::set<std::uint32_t> seen{d.entry};
  std::deque<std::uint32_t> work{d.entry};
  std::function<void(const std::vector<TStmt>&)> visit = [&](const std::vector<TStmt>& list) {
    for (const auto& s : list) {
      if (s.kind == TStmtKind::If) {
        visit(s.thn);
        visit(s.els);
      } else if (s.kind != TStmtKind::Other && s.next.kind == Next::Block) {
        if (!d.blocks.count(s.next.block)) throw std::runtime_error("dangling block index");
        if (seen.insert(s.next.block).second) work.push_back(s.next.block);
      }
    }
  };
  while (!work.empty()) {
    auto b = work.front();
    work.pop_front();
    visit(d.blocks.at(b));
  }
  return seen.size() == d.blocks.size();
}

}  // namespace

TEST_SUITE("stmtir") {
  TEST_CASE("fig5 lowers to the fig6 statement list") {
    auto c = compile_model("fig5.cppl");
    const auto& f = c.stage("f").lowered;
    CHECK(stmts_to_string(f.stmts) ==
          "[other, checkpoint, other, if [other] [other], other, if [other, if [other] [call], other] [other], other]");
    CHECK(stmts_to_string(f.stmts) == stmts_to_string(fig6a()));
  }

  TEST_CASE("a constant body is one other") {
    auto c = compile_source("42");
    CHECK(stmts_to_string(c.stage("main").lowered.stmts) == "[other]");
  }

  TEST_CASE("builtin calls are other, not call") {
    auto c = compile_model("fig5.cppl");
    const auto& f = c.stage("f").lowered;
    CHECK(f.stmts[2].kind == StmtKind::Other);
    CHECK(describe_payload(f.payloads[f.stmts[2].payload]) == "t1 = geqf s1 1.");
  }

  TEST_CASE("fig6 decomposition") {
    auto raw = decompose(fig6a());
    CHECK(raw.blocks.size() == 4);
    CHECK(raw.entry == raw.blocks.rbegin()->first);
    auto d = renumber(raw);
    REQUIRE(d.blocks.size() == 4);
    CHECK(d.entry == 0);
    CHECK(tstmts_to_string(d.blocks[0]) == "[other, checkpoint 1]");
    CHECK(tstmts_to_string(d.blocks[1]) ==
          "[other, if [other] [other], other, if [other, if [other, jump 2] [call 2]] [other, jump 3]]");
    CHECK(tstmts_to_string(d.blocks[2]) == "[other, jump 3]");
    CHECK(tstmts_to_string(d.blocks[3]) == "[other, jump return]");
    CHECK(check_tail_position(d.blocks));
  }

  TEST_CASE("compiled fig5 blocks match the hand-built decomposition") {
    auto c = compile_model("fig5.cppl");
    auto expect = renumber(decompose(fig6a()));
    const auto& got = c.stage("f").blocks;
    REQUIRE(got.blocks.size() == expect.blocks.size());
    for (const auto& [b, list] : expect.blocks) CHECK(tstmts_to_string(got.blocks.at(b)) == tstmts_to_string(list));
  }

  TEST_CASE("single other") {
    auto d = decompose({other()});
    REQUIRE(d.blocks.size() == 1);
    CHECK(tstmts_to_string(d.blocks[d.entry]) == "[other, jump return]");
  }

  TEST_CASE("single checkpoint") {
    auto d = decompose({checkpoint()});
    REQUIRE(d.blocks.size() == 1);
    CHECK(tstmts_to_string(d.blocks[d.entry]) == "[checkpoint return]");
  }

  TEST_CASE("tail position violations are detected") {
    TStmt cp;
    cp.kind = TStmtKind::Checkpoint;
    cp.next = Next::to(1);
    BlockMap bad{{0, {cp, TStmt{}}}};
    CHECK_FALSE(check_tail_position(bad));
    TStmt nested;
    nested.kind = TStmtKind::If;
    nested.thn = {cp, TStmt{}};
    CHECK_FALSE(check_tail_position(BlockMap{{0, {nested}}}));
    CHECK(check_tail_position(BlockMap{{0, {TStmt{}, cp}}}));
  }

  TEST_CASE("generated lists decompose with calls and checkpoints in tail position") {
    StmtGen g(1);
    for (int round = 0; round < 1000; ++round) {
      auto s = g.list(6, 3);
      CAPTURE(stmts_to_string(s));
      auto d = decompose(s);
      CHECK(check_tail_position(d.blocks));
      CHECK(all_reachable(d));
      CHECK(check_tail_position(renumber(d).blocks));
      CHECK(renumber(d).blocks.size() == d.blocks.size());
    }
  }

  TEST_CASE("lists without checkpoints or calls stay in one block") {
    StmtGen g(2);
    g.transfers = false;
    for (int round = 0; round < 500; ++round) {
      auto s = g.list(6, 3);
      CAPTURE(stmts_to_string(s));
      CHECK(decompose(s).blocks.size() == 1);
    }
  }

  TEST_CASE("flattening the blocks gives back the source path") {
    StmtGen g(3);
    g.max_ifs = 4;
    std::size_t checked = 0;
    for (int round = 0; round < 1000; ++round) {
      auto s = g.list(5, 3);
      CAPTURE(stmts_to_string(s));
      auto d = decompose(s);
      std::size_t ifs = g.ifs_made;
      for (std::uint32_t bits = 0; bits < (1u << ifs); ++bits) {
        auto decide = [&](std::uint32_t payload) { return ((bits >> g.if_index.at(payload)) & 1u) != 0; };
        CHECK(flatten_source(s, decide) == flatten_blocks(d, decide));
        ++checked;
      }
    }
    CHECK(checked > 1000);
  }
}
