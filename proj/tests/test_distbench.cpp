#include <gtest/gtest.h>

#include <cstring>
#include <future>
#include <sstream>
#include <thread>

#include "hdbench/dataio/dense.hpp"
#include "hdbench/dist/bench.hpp"
#include "hdbench/dist/master.hpp"
#include "hdbench/dist/worker.hpp"
#include "hdbench/linmodels.hpp"

using namespace hdbench;
using namespace hdbench::dist;
using namespace std::chrono_literals;

namespace {

ClusterSpec loopback(std::size_t workers, double round_timeout_s = 30.0) {
  ClusterSpec spec;
  spec.master_address = "127.0.0.1:0";
  spec.round_timeout_s = round_timeout_s;
  spec.accept_timeout_s = 20.0;
  for (std::uint32_t id = 0; id < workers; ++id) spec.workers.push_back({id, 1, ""});
  return spec;
}

// Runs the master on an ephemeral port and one in-process worker per part.
struct LocalCluster {
  std::vector<int> exits;
  MasterResult result;

  void run(const ClusterSpec& spec, MasterOptions opt, const std::vector<DenseDataset>& parts,
           std::size_t batch_size = 32) {
    std::promise<std::uint16_t> port;
    auto listening = port.get_future();
    opt.on_listening = [&](std::uint16_t p) { port.set_value(p); };
    auto master = std::async(std::launch::async, [&] { return run_master(spec, opt); });
    const auto p = listening.get();
    exits.assign(parts.size(), -1);
    std::vector<std::thread> workers;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      workers.emplace_back([&, i] {
        WorkerOptions w;
        w.connect = "127.0.0.1:" + std::to_string(p);
        w.worker_id = spec.workers[i].id;
        w.batch_size = batch_size;
        w.idle_timeout_s = 30.0;
        exits[i] = run_worker(w, &parts[i]);
      });
    }
    for (auto& t : workers) t.join();
    result = master.get();
  }
};

// A hand-driven peer for exercising the error paths.
Channel dial(std::uint16_t port) {
  return Channel(Socket::connect({"127.0.0.1", port}, Clock::now() + 5s), "test peer");
}

std::vector<DenseDataset> round_robin_parts(const DenseDataset& ds, std::size_t k) {
  std::vector<std::vector<std::size_t>> idx(k);
  for (std::size_t i = 0; i < ds.size(); ++i) idx[i % k].push_back(i);
  std::vector<DenseDataset> out;
  for (auto& v : idx) out.push_back(ds.subset(v));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Codec

TEST(Codec, HelloBytesAreBigEndian) {
  const auto frame = encode_frame(Hello{1, 2, 3});
  const std::vector<std::uint8_t> want{0, 0, 0, 17, 0x01, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 2, 0, 0, 0, 3};
  EXPECT_EQ(std::vector<std::uint8_t>(frame.begin(), frame.end()), want);
  EXPECT_EQ(frame.size(), hello_frame_size());
}

TEST(Codec, FloatsAreLittleEndian) {
  const auto frame = encode_frame(Params{7, {1.0}});
  const std::vector<std::uint8_t> want{0, 0, 0, 17, 0x03, 0, 0, 0, 7, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0xf0, 0x3f};
  EXPECT_EQ(std::vector<std::uint8_t>(frame.begin(), frame.end()), want);
  EXPECT_EQ(frame.size(), params_frame_size(1));
}

TEST(Codec, EveryMessageRoundTrips) {
  const std::vector<Message> msgs = {
      ErrorMsg{"part missing: naïve.csv"},
      Hello{42, 1ull << 40, 2000},
      ConfigMsg{Algo::svm, 10, 0xDEADBEEFCAFEull, 1e-4, 0.05},
      Params{3, {0.0, -0.0, 1e-310, -2.5, 1e300}},
      Update{9, 12345, {std::numeric_limits<double>::infinity(), 3.25}},
      Done{},
      Params{0, {}},
      ErrorMsg{""},
  };
  for (const auto& m : msgs) {
    const auto frame = encode_frame(m);
    const auto back = decode_payload(std::span(frame).subspan(kLengthPrefix));
    EXPECT_EQ(back, m) << type_name(m);
  }
  EXPECT_EQ(encode_frame(ConfigMsg{}).size(), config_frame_size());
  EXPECT_EQ(encode_frame(Done{}).size(), done_frame_size());
  EXPECT_EQ(encode_frame(Update{0, 1, std::vector<double>(5)}).size(), update_frame_size(5));
}

TEST(Codec, TwoThousandDimVectorIsBitExact) {
  Rng rng(5);
  std::vector<double> v(2000);
  for (auto& x : v) x = rng.normal() * std::pow(10.0, static_cast<double>(rng.below(40)) - 20.0);
  v[7] = std::numeric_limits<double>::quiet_NaN();
  v[8] = std::numeric_limits<double>::denorm_min();
  const auto frame = encode_frame(Update{1, 2, v});
  const auto back = std::get<Update>(decode_payload(std::span(frame).subspan(kLengthPrefix)));
  ASSERT_EQ(back.values.size(), v.size());
  EXPECT_EQ(std::memcmp(back.values.data(), v.data(), v.size() * sizeof(double)), 0);
}

TEST(Codec, TruncatedAndPaddedPayloadsAreRejected) {
  const std::vector<Message> msgs = {Hello{1, 2, 3}, ConfigMsg{Algo::logistic, 1, 2, 3, 4}, Params{1, {1, 2}},
                                     Update{1, 2, {3}}, Done{}};
  for (const auto& m : msgs) {
    const auto payload = encode_payload(m);
    for (std::size_t len = 0; len < payload.size(); ++len) {
      if (std::holds_alternative<Done>(m)) break;
      EXPECT_THROW(decode_payload(std::span(payload).first(len)), ProtocolError) << type_name(m) << " len " << len;
    }
    auto padded = payload;
    padded.push_back(0);
    EXPECT_THROW(decode_payload(padded), ProtocolError) << type_name(m);
  }
  const std::vector<std::uint8_t> unknown_type{0x09, 1, 2};
  EXPECT_THROW(decode_payload(unknown_type), ProtocolError);
  auto bad_algo = encode_payload(ConfigMsg{});
  bad_algo[1] = 7;
  EXPECT_THROW(decode_payload(bad_algo), ProtocolError);
  // Count field claims more floats than the body holds.
  auto lying = encode_payload(Params{0, {1.0}});
  lying[8] = 2;
  EXPECT_THROW(decode_payload(lying), ProtocolError);
}

TEST(Codec, RandomBytesNeverCrash) {
  Rng rng(77);
  std::size_t decoded = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    std::vector<std::uint8_t> junk(1 + rng.below(40));
    for (auto& b : junk) b = static_cast<std::uint8_t>(rng.below(256));
    if (rng.uniform() < 0.5) junk[0] = static_cast<std::uint8_t>(rng.below(7));
    try {
      decode_payload(junk);
      ++decoded;
    } catch (const ProtocolError&) {
    }
  }
  EXPECT_GT(decoded, 0u);
}

TEST(Codec, FrameDumpIsHex) {
  const std::vector<std::uint8_t> data{0x00, 0xab, 0x10};
  EXPECT_NE(frame_dump(data).find("ab"), std::string::npos);
}

// ---------------------------------------------------------------------------
// Configuration

TEST(Config, EndpointsAndClusterJson) {
  const auto ep = parse_endpoint("localhost:7077");
  EXPECT_EQ(ep.port, 7077);
  EXPECT_THROW(parse_endpoint("nohost"), ConfigError);
  EXPECT_THROW(parse_endpoint("h:99999"), ConfigError);
  const auto spec = cluster_from_json(nlohmann::json::parse(R"({
    "master_address": "0.0.0.0:7077", "round_timeout_s": 5, "max_rounds": 20,
    "workers": [{"id": 0, "cores": 4, "part": "p0.csv"}, {"id": 1, "cores": 2, "part": "p1.csv"}]})"));
  EXPECT_EQ(spec.workers.size(), 2u);
  EXPECT_EQ(spec.workers[1].part_path, "p1.csv");
  EXPECT_EQ(spec.round_timeout_s, 5.0);
  EXPECT_THROW(cluster_from_json(nlohmann::json::parse(R"({"workers": [{"id": 0, "part": "a"}, {"id": 0, "part": "b"}]})")),
               ConfigError);
  EXPECT_EQ(ClusterSpec{}.master_address, "0.0.0.0:7077");
}

// ---------------------------------------------------------------------------
// Aggregation

TEST(Average, EqualCountsGiveExactMean) {
  const std::vector<double> a{1.0, 0.1, -3.0}, b{2.0, 0.2, 5.0}, c{4.0, 0.3, 1e-9};
  const std::vector<Contribution> parts{{500, a}, {500, b}, {500, c}};
  const auto avg = weighted_average(parts);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(avg[j], (a[j] + b[j] + c[j]) / 3.0);
  const std::vector<Contribution> single{{123, b}};
  EXPECT_EQ(weighted_average(single), b);
}

TEST(Average, WeightsByCount) {
  const std::vector<double> a{0.0}, b{4.0};
  const std::vector<Contribution> parts{{3, a}, {1, b}};
  EXPECT_EQ(weighted_average(parts)[0], 1.0);
  const std::vector<Contribution> zeros{{0, a}, {0, b}};
  EXPECT_THROW(weighted_average(zeros), DataError);
}

// ---------------------------------------------------------------------------
// End to end over loopback

TEST(Cluster, OneWorkerEqualsLocalLogistic) {
  const auto ds = generate_synthetic(800, 30, 2.0, 3);
  SgdConfig cfg;
  cfg.seed = 19;
  cfg.epochs_or_iters = 6;
  MasterOptions opt;
  opt.config = cfg;
  opt.rounds = 6;
  LocalCluster c;
  c.run(loopback(1), opt, {ds});
  EXPECT_EQ(c.exits, std::vector<int>{0});
  const auto local = train_logistic(ds, cfg);
  ASSERT_EQ(c.result.model.weights.size(), local.weights.size());
  for (std::size_t j = 0; j < local.weights.size(); ++j) EXPECT_NEAR(c.result.model.weights[j], local.weights[j], 1e-9);
  EXPECT_NEAR(c.result.model.bias, local.bias, 1e-9);
}

TEST(Cluster, OneWorkerEqualsLocalPegasos) {
  const auto ds = generate_synthetic(300, 10, 2.0, 4);
  SgdConfig cfg;
  cfg.seed = 5;
  cfg.lambda = 1e-2;
  cfg.epochs_or_iters = 4 * 300;
  MasterOptions opt;
  opt.algo = LinearKind::svm;
  opt.config = cfg;
  opt.rounds = 4;
  LocalCluster c;
  c.run(loopback(1), opt, {ds});
  const auto local = train_pegasos(ds, cfg);
  for (std::size_t j = 0; j < local.weights.size(); ++j) EXPECT_NEAR(c.result.model.weights[j], local.weights[j], 1e-9);
  EXPECT_NEAR(c.result.model.bias, local.bias, 1e-9);
  EXPECT_EQ(c.result.model.kind, LinearKind::svm);
}

TEST(Cluster, ThreeWorkersAreBitReproducible) {
  const auto parts = round_robin_parts(generate_synthetic(900, 12, 2.0, 8), 3);
  SgdConfig cfg;
  cfg.seed = 2;
  MasterOptions opt;
  opt.config = cfg;
  opt.rounds = 4;
  LocalCluster a, b;
  a.run(loopback(3), opt, parts);
  b.run(loopback(3), opt, parts);
  EXPECT_EQ(a.exits, (std::vector<int>{0, 0, 0}));
  EXPECT_EQ(a.result.model, b.result.model);
  EXPECT_EQ(a.result.record.rounds.size(), 4u);
}

TEST(Cluster, HoldoutAucCloseToSingleNode) {
  const auto all = generate_synthetic(4000, 40, 4.0, 12);
  std::vector<std::size_t> head(3200), tail(800);
  for (std::size_t i = 0; i < 4000; ++i) (i < 3200 ? head[i] : tail[i - 3200]) = i;
  const struct {
    DenseDataset train, test;
  } split{all.subset(head), all.subset(tail)};
  SgdConfig cfg;
  cfg.seed = 4;
  cfg.epochs_or_iters = 5;
  MasterOptions opt;
  opt.config = cfg;
  opt.rounds = 5;
  opt.holdout = &split.test;
  LocalCluster c;
  c.run(loopback(3), opt, round_robin_parts(split.train, 3));
  ASSERT_TRUE(c.result.record.holdout_auc.has_value());
  const auto local = train_logistic(split.train, cfg);
  std::vector<int> y(split.test.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = split.test.label(i) > 0.5 ? 1 : 0;
  const double local_auc = eval::auc_roc(y, decision_scores(local, split.test));
  EXPECT_NEAR(*c.result.record.holdout_auc, local_auc, 0.02);
}

TEST(Cluster, ByteAccountingMatchesFrameSizes) {
  const auto parts = round_robin_parts(generate_synthetic(300, 7, 1.0, 1), 2);
  MasterOptions opt;
  opt.rounds = 3;
  LocalCluster c;
  c.run(loopback(2), opt, parts);
  const auto& rec = c.result.record;
  const std::size_t dim = 8, w = 2;
  for (const auto& r : rec.rounds) {
    EXPECT_EQ(r.bytes_sent, w * params_frame_size(dim));
    EXPECT_EQ(r.bytes_received, w * update_frame_size(dim));
    EXPECT_EQ(r.attempts, 1u);
  }
  EXPECT_EQ(rec.handshake_bytes, w * (hello_frame_size() + config_frame_size()));
  EXPECT_EQ(rec.bytes_sent, w * (config_frame_size() + 3 * params_frame_size(dim) + done_frame_size()));
  EXPECT_EQ(rec.bytes_received, w * (hello_frame_size() + 3 * update_frame_size(dim)));
  const auto j = to_json(rec);
  EXPECT_EQ(j.at("rounds").size(), 3u);
  EXPECT_EQ(j.at("workers"), 2);
}

TEST(Cluster, CancelStopsBeforeNextRound) {
  const auto parts = round_robin_parts(generate_synthetic(200, 5, 1.0, 2), 1);
  std::atomic<bool> cancel{false};
  MasterOptions opt;
  opt.rounds = 50;
  opt.cancel = &cancel;
  opt.on_round = [&](const RoundStats& s) {
    if (s.round == 1) cancel = true;
  };
  LocalCluster c;
  c.run(loopback(1), opt, parts);
  EXPECT_TRUE(c.result.record.cancelled);
  EXPECT_EQ(c.result.record.rounds.size(), 2u);
  EXPECT_EQ(c.exits, std::vector<int>{0});
}

// ---------------------------------------------------------------------------
// Worker error paths against a scripted master

namespace {

struct ScriptedMaster {
  Listener listener = Listener::bind({"127.0.0.1", 0});
  std::uint16_t port() const { return listener.port(); }
  Socket accept() {
    auto s = listener.accept(Clock::now() + 10s);
    if (!s) throw std::runtime_error("no worker connected");
    return std::move(*s);
  }
};

WorkerOptions worker_for(std::uint16_t port, const std::string& part = "") {
  WorkerOptions w;
  w.connect = "127.0.0.1:" + std::to_string(port);
  w.part_path = part;
  w.connect_attempts = 1;
  w.idle_timeout_s = 10.0;
  return w;
}

}  // namespace

TEST(Worker, DoneRightAfterHelloExitsCleanly) {
  ScriptedMaster m;
  const auto ds = generate_synthetic(20, 3, 1.0, 1);
  auto worker = std::async(std::launch::async, [&] { return run_worker(worker_for(m.port()), &ds); });
  Channel ch(m.accept(), "worker");
  EXPECT_EQ(std::get<Hello>(ch.receive(Clock::now() + 10s)), (Hello{0, 20, 3}));
  ch.send(Done{}, Clock::now() + 5s);
  EXPECT_EQ(worker.get(), worker_ok);
}

TEST(Worker, MalformedFramesGiveNonzeroExit) {
  const auto ds = generate_synthetic(20, 3, 1.0, 1);
  const std::vector<std::vector<std::uint8_t>> frames = {
      {0, 0, 0, 2, 0x09, 0x00},                 // unknown type
      {0xff, 0xff, 0xff, 0xff},                 // oversize length
      {0, 0, 0, 0},                             // empty payload
      {0, 0, 0, 30, 0x03, 0, 0},                // truncated, then the connection closes
      {0, 0, 0, 9, 0x03, 0, 0, 0, 0, 0, 0, 0, 0},  // PARAMS before CONFIG
  };
  for (const auto& f : frames) {
    ScriptedMaster m;
    auto worker = std::async(std::launch::async, [&] { return run_worker(worker_for(m.port()), &ds); });
    {
      auto sock = m.accept();
      std::vector<std::uint8_t> hello(hello_frame_size());
      sock.recv_exact(hello, Clock::now() + 10s);
      sock.send_all(f, Clock::now() + 5s);
      if (f.size() == 7) sock.close();
      EXPECT_EQ(worker.get(), worker_protocol_error) << frame_dump(f);
    }
  }
}

TEST(Worker, UnreadablePartReportsErrorAndExitsTwo) {
  ScriptedMaster m;
  auto worker = std::async(std::launch::async, [&] { return run_worker(worker_for(m.port(), "/nonexistent/part.csv")); });
  Channel ch(m.accept(), "worker");
  const auto msg = ch.receive(Clock::now() + 10s);
  ASSERT_TRUE(std::holds_alternative<ErrorMsg>(msg));
  EXPECT_NE(std::get<ErrorMsg>(msg).message.find("part.csv"), std::string::npos);
  EXPECT_EQ(worker.get(), worker_data_error);
}

TEST(Worker, NoMasterMeansBoundedRetries) {
  std::uint16_t port;
  {
    ScriptedMaster m;
    port = m.port();
  }
  const auto ds = generate_synthetic(20, 3, 1.0, 1);
  auto opt = worker_for(port);
  opt.connect_attempts = 3;
  opt.retry_delay_s = 0.01;
  EXPECT_EQ(run_worker(opt, &ds), worker_protocol_error);
}

// ---------------------------------------------------------------------------
// Master error paths against scripted workers

namespace {

struct MasterUnderTest {
  std::promise<std::uint16_t> port_promise;
  std::future<MasterResult> result;
  std::uint16_t port = 0;

  MasterUnderTest(const ClusterSpec& spec, MasterOptions opt) {
    auto fut = port_promise.get_future();
    opt.on_listening = [this](std::uint16_t p) { port_promise.set_value(p); };
    result = std::async(std::launch::async, [spec, opt] { return run_master(spec, opt); });
    port = fut.get();
  }
};

std::string master_error(MasterUnderTest& m) {
  try {
    m.result.get();
  } catch (const ProtocolError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Master, RejectsGarbageInsteadOfHello) {
  const std::vector<std::vector<std::uint8_t>> frames = {
      {0, 0, 0, 2, 0x07, 0x00},
      {0x7f, 0xff, 0xff, 0xff},
      {0, 0, 0, 1, 0x05},  // DONE instead of HELLO
  };
  for (const auto& f : frames) {
    MasterUnderTest m(loopback(1, 2.0), MasterOptions{});
    auto sock = Socket::connect({"127.0.0.1", m.port}, Clock::now() + 5s);
    sock.send_all(f, Clock::now() + 5s);
    EXPECT_NE(master_error(m).find("protocol violation"), std::string::npos) << frame_dump(f);
  }
}

TEST(Master, RejectsUnknownAndDuplicateIds) {
  {
    MasterUnderTest m(loopback(1, 2.0), MasterOptions{});
    auto ch = dial(m.port);
    ch.send(Hello{9, 10, 3}, Clock::now() + 5s);
    EXPECT_NE(master_error(m).find("unknown worker id 9"), std::string::npos);
  }
  {
    MasterUnderTest m(loopback(2, 2.0), MasterOptions{});
    auto a = dial(m.port);
    a.send(Hello{0, 10, 3}, Clock::now() + 5s);
    auto b = dial(m.port);
    b.send(Hello{0, 10, 3}, Clock::now() + 5s);
    EXPECT_NE(master_error(m).find("duplicate worker id 0"), std::string::npos);
  }
  {
    MasterUnderTest m(loopback(2, 2.0), MasterOptions{});
    auto a = dial(m.port);
    a.send(Hello{0, 10, 3}, Clock::now() + 5s);
    auto b = dial(m.port);
    b.send(Hello{1, 10, 4}, Clock::now() + 5s);
    EXPECT_NE(master_error(m).find("feature count"), std::string::npos);
  }
}

TEST(Master, WorkerStartupErrorIsReported) {
  MasterUnderTest m(loopback(1, 2.0), MasterOptions{});
  auto ch = dial(m.port);
  ch.send(ErrorMsg{"cannot load part"}, Clock::now() + 5s);
  EXPECT_NE(master_error(m).find("worker failed to start: cannot load part"), std::string::npos);
}

TEST(Master, TimeoutRetriesOnceThenSucceeds) {
  MasterOptions opt;
  opt.rounds = 2;
  MasterUnderTest m(loopback(1, 0.3), opt);
  auto ch = dial(m.port);
  ch.send(Hello{0, 4, 2}, Clock::now() + 5s);
  EXPECT_TRUE(std::holds_alternative<ConfigMsg>(ch.receive(Clock::now() + 5s)));
  const auto first = std::get<Params>(ch.receive(Clock::now() + 5s));  // ignored: the round times out
  EXPECT_EQ(first.round, 0u);
  for (;;) {
    const auto msg = ch.receive(Clock::now() + 5s);
    if (std::holds_alternative<Done>(msg)) break;
    const auto& p = std::get<Params>(msg);
    ch.send(Update{p.round, 4, {1.0, 2.0, 3.0}}, Clock::now() + 5s);
  }
  const auto res = m.result.get();
  ASSERT_EQ(res.record.rounds.size(), 2u);
  EXPECT_EQ(res.record.rounds[0].attempts, 2u);
  EXPECT_EQ(res.record.rounds[1].attempts, 1u);
  EXPECT_EQ(res.model.weights, (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(res.model.bias, 3.0);
}

TEST(Master, SilentWorkerFailsRunAfterRetry) {
  MasterUnderTest m(loopback(2, 0.2), MasterOptions{});
  auto a = dial(m.port);
  a.send(Hello{0, 4, 2}, Clock::now() + 5s);
  auto b = dial(m.port);
  b.send(Hello{1, 4, 2}, Clock::now() + 5s);
  std::thread responder([&] {
    try {
      for (;;) {
        const auto msg = a.receive(Clock::now() + 5s);
        if (std::holds_alternative<Done>(msg)) return;
        if (const auto* p = std::get_if<Params>(&msg)) a.send(Update{p->round, 4, {0.0, 0.0, 0.0}}, Clock::now() + 5s);
      }
    } catch (const ProtocolError&) {
    }
  });
  const auto err = master_error(m);
  responder.join();
  EXPECT_NE(err.find("round 0 failed after retry; timed out: worker 1"), std::string::npos) << err;
}

TEST(Master, WrongUpdateWidthIsAViolation) {
  MasterUnderTest m(loopback(1, 2.0), MasterOptions{});
  auto ch = dial(m.port);
  ch.send(Hello{0, 4, 2}, Clock::now() + 5s);
  ch.receive(Clock::now() + 5s);
  ch.receive(Clock::now() + 5s);
  ch.send(Update{0, 4, {1.0}}, Clock::now() + 5s);
  EXPECT_NE(master_error(m).find("UPDATE carries 1 values"), std::string::npos);
}

// ---------------------------------------------------------------------------
// Comparison tables

namespace {

BenchRecord record(const std::string& algo, double wall, std::optional<double> auc) {
  BenchRecord r;
  r.algorithm = algo;
  r.dataset = {"epsilon-synth", 10000, 200};
  r.wall_clock_s = wall;
  r.holdout_auc = auc;
  return r;
}

}  // namespace

TEST(Compare, SpeedupExamples) {
  const DatasetIdentity id{"epsilon-synth", 10000, 200};
  auto same = bench_compare({{"logistic", id, 12.0, 0.95}}, record("logistic", 12.0, 0.96));
  EXPECT_EQ(same.rows.at(0).speedup, 1.0);
  auto twice = bench_compare({{"logistic", id, 300.0, 0.93}}, record("logistic", 150.0, 0.9504));
  EXPECT_EQ(twice.rows.at(1).speedup, 2.0);
  std::ostringstream csv;
  write_comparison_csv(csv, twice);
  EXPECT_EQ(csv.str(), "algorithm,mode,wall_clock_s,auc_roc,speedup\n"
                       "logistic,local,300.00,0.9300,2.00\n"
                       "logistic,distributed,150.00,0.9504,2.00\n");
}

TEST(Compare, TreesAreLocalOnlyAndMismatchesFail) {
  const DatasetIdentity id{"epsilon-synth", 10000, 200};
  const auto c = bench_compare({{"svm", id, 10.0, 0.9}, {"gbt", id, 20.0, 0.91}}, record("svm", 5.0, 0.92));
  ASSERT_EQ(c.rows.size(), 3u);
  EXPECT_FALSE(c.rows[2].speedup.has_value());
  ASSERT_EQ(c.notes.size(), 1u);
  EXPECT_NE(c.notes[0].find("gbt"), std::string::npos);
  std::ostringstream table;
  write_comparison_table(table, c);
  EXPECT_NE(table.str().find("0.9200"), std::string::npos);

  const DatasetIdentity other{"imdb", 10000, 200};
  EXPECT_THROW(bench_compare({{"svm", other, 10.0, 0.9}}, record("svm", 5.0, 0.92)), DataError);
  EXPECT_THROW(bench_compare({{"svm", id, 10.0, 0.9}}, record("logistic", 5.0, 0.92)), ConfigError);
}

TEST(Compare, RecordsRoundTripThroughJson) {
  auto r = record("svm", 5.5, 0.92);
  r.workers = 3;
  r.rounds.push_back({0, 1.25, 400, 500, 2});
  r.bytes_sent = 400;
  r.cancelled = true;
  const auto back = bench_record_from_json(to_json(r));
  EXPECT_EQ(to_json(back), to_json(r));
  r.holdout_auc.reset();
  EXPECT_FALSE(bench_record_from_json(to_json(r)).holdout_auc.has_value());
  EXPECT_THROW(bench_record_from_json(nlohmann::json{{"algorithm", "svm"}}), DataError);

  const LocalResult l{"mlp", {"epsilon-synth", 10000, 200}, 3.5, 0.88};
  const auto lb = local_result_from_json(to_json(l));
  EXPECT_EQ(lb.algorithm, "mlp");
  EXPECT_EQ(lb.dataset, l.dataset);
  EXPECT_EQ(lb.wall_clock_s, 3.5);
  EXPECT_EQ(lb.auc_roc, 0.88);
}
