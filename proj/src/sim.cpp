#include "wpan/sim.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <deque>
#include <queue>
#include <stdexcept>

#include "wpan/rng.hpp"
#include "wpan/stats.hpp"
#include "wpan/units.hpp"

namespace wpan {

namespace {

// Kind order breaks same-node same-time ties: a frame must leave the air
// before the same instant's channel activity is re-examined.
enum EvKind : int {
  kTxEnd = 0,
  kTxStart = 1,
  kCcaResult = 2,
  kBackoffEnd = 3,
  kArrival = 4,
};

struct Ev {
  int64_t t;
  int node;
  int kind;
  bool flag;  // CCA outcome payload
};

struct EvLater {
  bool operator()(const Ev& a, const Ev& b) const {
    if (a.t != b.t) return a.t > b.t;
    if (a.node != b.node) return a.node > b.node;
    return a.kind > b.kind;
  }
};

struct Packet {
  int src;
  int64_t gen_t;
};

enum class Mac { kIdle, kBackoff, kCca, kTurnaround, kTx };

struct NodeState {
  std::deque<Packet> q;
  Mac mac = Mac::kIdle;
  int nb = 0;       // failed CCAs of the current transmission attempt
  int retries = 0;  // failed transmissions of the head-of-line packet
  int64_t busy_since = -1;
  int64_t tx_since = -1;
  int64_t next_arrival = -1;
  Rng rng{0};
};

struct ActiveTx {
  int node;
  int64_t start, data_end, end;
  bool collided;
};

class Simulator {
 public:
  Simulator(const NetworkModel& m, const Neighborhoods& nb,
            const ProtocolParams& p, const SimConfig& cfg, uint64_t seed)
      : m_(m), nb_(nb), p_(p), cfg_(cfg) {
    n_ = m.size();
    t_end_ = llround(units::seconds_to_symbols(cfg.duration_s));
    w_beg_ = llround(units::seconds_to_symbols(cfg.warmup_s));
    if (w_beg_ >= t_end_)
      throw std::invalid_argument("simulate: warmup must be shorter than duration");

    st_.resize(n_);
    run_.nodes.assign(n_, {});
    run_.sources.assign(n_, {});
    run_.window_symbols = t_end_ - w_beg_;
    if (cfg.record_pair_stats)
      run_.cca_hidden_only.assign(n_, std::vector<int64_t>(n_, 0));

    lambda_.assign(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
      st_[i].rng = Rng(mix_seed(seed, static_cast<uint64_t>(i)));
      double pps = m.nodes[i].lambda_pps;
      if (cfg.lambda_pps_override && m.nodes[i].role == NodeRole::kSource)
        pps = *cfg.lambda_pps_override;
      lambda_[i] = units::pps_to_per_symbol(pps);
    }

    // Interference at i's receiver: everything the parent hears, plus the
    // parent itself.
    rx_interferer_.assign(n_, std::vector<char>(n_, 0));
    for (int i = 0; i < n_; ++i) {
      const int r = nb.parent[i];
      if (r < 0) continue;
      for (int k = 0; k < n_; ++k)
        rx_interferer_[i][k] = (k != i) && (nb.in_omega[r][k] || k == r);
    }
  }

  SimRun run() {
    for (int i = 0; i < n_; ++i)
      if (lambda_[i] > 0.0) schedule_arrival(i, 0);

    [[maybe_unused]] int64_t now = 0;
    while (!heap_.empty() && heap_.top().t < t_end_) {
      const Ev ev = heap_.top();
      heap_.pop();
      assert(ev.t >= now);
      now = ev.t;
      switch (ev.kind) {
        case kTxEnd: on_tx_end(ev); break;
        case kTxStart: on_tx_start(ev); break;
        case kCcaResult: on_cca_result(ev); break;
        case kBackoffEnd: on_backoff_end(ev); break;
        case kArrival: on_arrival(ev); break;
      }
    }

    // Close the time integrals at the horizon.
    for (int i = 0; i < n_; ++i) {
      if (st_[i].busy_since >= 0)
        run_.nodes[i].busy_symbols += overlap(st_[i].busy_since, t_end_);
      if (st_[i].tx_since >= 0)
        run_.nodes[i].tx_symbols += overlap(st_[i].tx_since, t_end_);
    }
    // Window packets still queued: makes generated = delivered + dropped +
    // in_flight an exact identity.
    for (int i = 0; i < n_; ++i)
      for (const Packet& pkt : st_[i].q)
        if (in_window(pkt.gen_t)) ++run_.sources[pkt.src].in_flight;
    return run_;
  }

 private:
  bool in_window(int64_t t) const { return t >= w_beg_ && t < t_end_; }

  int64_t overlap(int64_t a, int64_t b) const {
    const int64_t lo = std::max(a, w_beg_);
    const int64_t hi = std::min(b, t_end_);
    return hi > lo ? hi - lo : 0;
  }

  void schedule(int64_t t, int node, int kind, bool flag = false) {
    heap_.push(Ev{t, node, kind, flag});
  }

  void schedule_arrival(int i, int64_t now) {
    const double gap = st_[i].rng.exponential(lambda_[i]);
    const int64_t step = std::max<int64_t>(1, llround(std::ceil(gap)));
    st_[i].next_arrival = now + step;
    schedule(st_[i].next_arrival, i, kArrival);
  }

  void start_csma(int i, int64_t now) {
    st_[i].nb = 0;
    draw_backoff(i, now);
  }

  void draw_backoff(int i, int64_t now) {
    const int stage = st_[i].nb;
    const int slots =
        static_cast<int>(st_[i].rng.uniform_below(p_.backoff_window(stage)));
    st_[i].mac = Mac::kBackoff;
    schedule(now + int64_t(slots) * p_.slot_symbols, i, kBackoffEnd);
  }

  bool channel_busy_for(int i, int64_t t, std::vector<int>* blockers) const {
    bool busy = false;
    for (const ActiveTx& a : active_) {
      if (a.node == i) continue;
      if (a.start <= t && t < a.end && nb_.in_omega[i][a.node]) {
        busy = true;
        if (blockers)
          blockers->push_back(a.node);
        else
          break;
      }
    }
    return busy;
  }

  void on_arrival(const Ev& ev) {
    const int i = ev.node;
    enqueue(i, Packet{i, ev.t}, ev.t);
    if (in_window(ev.t)) ++run_.sources[i].generated;
    schedule_arrival(i, ev.t);
  }

  void enqueue(int i, Packet pkt, int64_t now) {
    NodeState& s = st_[i];
    const bool was_empty = s.q.empty();
    s.q.push_back(pkt);
    if (was_empty) {
      s.busy_since = now;
      assert(s.mac == Mac::kIdle);
      s.retries = 0;
      start_csma(i, now);
    }
  }

  void on_backoff_end(const Ev& ev) {
    const int i = ev.node;
    NodeState& s = st_[i];
    assert(s.mac == Mac::kBackoff && !s.q.empty());

    // The CCA outcome is decided by the channel state at its start.
    std::vector<int> blockers;
    const bool busy =
        channel_busy_for(i, ev.t, cfg_.record_pair_stats ? &blockers : nullptr);
    if (in_window(ev.t)) {
      ++run_.nodes[i].cca_attempts;
      if (busy) {
        ++run_.nodes[i].cca_busy;
        if (cfg_.record_pair_stats) record_pair_split(i, blockers);
      }
    }
    s.mac = Mac::kCca;
    schedule(ev.t + p_.cca_symbols, i, kCcaResult, busy);
  }

  void record_pair_split(int j, const std::vector<int>& blockers) {
    // For every observer i that hears j: did only transmitters hidden from
    // i block this CCA?
    for (int i = 0; i < n_; ++i) {
      if (i == j || !nb_.in_omega[i][j]) continue;
      bool all_hidden = true;
      for (int k : blockers)
        if (k == i || nb_.in_omega[i][k]) {
          all_hidden = false;
          break;
        }
      if (all_hidden) ++run_.cca_hidden_only[j][i];
    }
  }

  void on_cca_result(const Ev& ev) {
    const int i = ev.node;
    NodeState& s = st_[i];
    assert(s.mac == Mac::kCca);
    if (!ev.flag) {  // channel idle: turn the radio around and transmit
      run_.nodes[i].max_ccas_per_attempt =
          std::max(run_.nodes[i].max_ccas_per_attempt, s.nb + 1);
      s.mac = Mac::kTurnaround;
      schedule(ev.t + p_.turnaround_symbols, i, kTxStart);
      return;
    }
    ++s.nb;
    assert(s.nb <= p_.cca_attempts());
    if (s.nb >= p_.cca_attempts()) {
      run_.nodes[i].max_ccas_per_attempt =
          std::max(run_.nodes[i].max_ccas_per_attempt, s.nb);
      complete_hol(i, ev.t, /*delivered=*/false, /*count_discard=*/true,
                   s.retries);
    } else {
      draw_backoff(i, ev.t);
    }
  }

  void on_tx_start(const Ev& ev) {
    const int i = ev.node;
    NodeState& s = st_[i];
    assert(s.mac == Mac::kTurnaround);
    s.mac = Mac::kTx;
    s.tx_since = ev.t;

    ActiveTx tx{i, ev.t, ev.t + p_.data_tx_symbols, ev.t + p_.tx_period(), false};
    for (ActiveTx& other : active_) {
      if (other.start <= ev.t && ev.t < other.end) {
        // The newcomer's frame is corrupted by anything its receiver hears.
        if (rx_interferer_[i][other.node]) tx.collided = true;
        // The newcomer corrupts frames still on the air whose receivers
        // hear it.
        if (rx_interferer_[other.node][i] && ev.t < other.data_end)
          other.collided = true;
      }
    }
    active_.push_back(tx);
    schedule(tx.end, i, kTxEnd);
  }

  void on_tx_end(const Ev& ev) {
    const int i = ev.node;
    NodeState& s = st_[i];
    assert(s.mac == Mac::kTx);

    bool collided = false;
    for (size_t k = 0; k < active_.size(); ++k) {
      if (active_[k].node == i) {
        collided = active_[k].collided;
        active_[k] = active_.back();
        active_.pop_back();
        break;
      }
    }

    run_.nodes[i].tx_symbols += overlap(s.tx_since, ev.t);
    s.tx_since = -1;

    const bool link_error = !collided && st_[i].rng.bernoulli(m_.nodes[i].link_per);
    const bool failed = collided || link_error;
    if (in_window(ev.t)) {
      ++run_.nodes[i].tx_count;
      if (failed) ++run_.nodes[i].tx_failures;
    }

    if (!failed) {
      complete_hol(i, ev.t, /*delivered=*/true, /*count_discard=*/false,
                   s.retries + 1);
    } else if (p_.acks_enabled) {
      ++s.retries;
      if (s.retries + 1 > p_.transmissions()) {
        complete_hol(i, ev.t, false, /*count_discard=*/true, s.retries);
      } else {
        start_csma(i, ev.t);
      }
    } else {
      // Without ACKs the sender cannot tell the frame was lost: exactly
      // one transmission, no retry, the packet is gone.
      complete_hol(i, ev.t, false, /*count_discard=*/false, 1);
    }
  }

  void complete_hol(int i, int64_t now, bool delivered, bool count_discard,
                    int tx_used) {
    NodeState& s = st_[i];
    assert(!s.q.empty());
    const Packet pkt = s.q.front();
    s.q.pop_front();

    assert(tx_used <= p_.transmissions());
    if (in_window(now)) {
      ++run_.nodes[i].hol_completions;
      if (count_discard) ++run_.nodes[i].discards;
      run_.nodes[i].max_tx_per_packet =
          std::max(run_.nodes[i].max_tx_per_packet, tx_used);
    }

    if (in_window(pkt.gen_t)) {
      if (delivered) {
        const int parent = nb_.parent[i];
        if (parent == nb_.bs) {
          ++run_.sources[pkt.src].delivered;
          run_.sources[pkt.src].delay_sum_symbols +=
              static_cast<double>(now - pkt.gen_t);
        }
      } else {
        ++run_.sources[pkt.src].dropped;
      }
    }

    s.retries = 0;
    if (!s.q.empty()) {
      start_csma(i, now);
    } else {
      s.mac = Mac::kIdle;
      run_.nodes[i].busy_symbols += overlap(s.busy_since, now);
      s.busy_since = -1;
    }

    if (delivered && nb_.parent[i] != nb_.bs) {
      enqueue(nb_.parent[i], pkt, now);
    }
  }

  const NetworkModel& m_;
  const Neighborhoods& nb_;
  const ProtocolParams& p_;
  const SimConfig& cfg_;
  int n_ = 0;
  int64_t t_end_ = 0, w_beg_ = 0;
  std::vector<NodeState> st_;
  std::vector<double> lambda_;
  std::vector<std::vector<char>> rx_interferer_;
  std::vector<ActiveTx> active_;
  std::priority_queue<Ev, std::vector<Ev>, EvLater> heap_;
  SimRun run_;
};

}  // namespace

SimRun simulate_once(const NetworkModel& m, const Neighborhoods& nb,
                     const ProtocolParams& p, const SimConfig& cfg,
                     uint64_t seed) {
  require_valid(p);
  Simulator sim(m, nb, p, cfg, seed);
  return sim.run();
}

SimAggregate replicate(const NetworkModel& m, const Neighborhoods& nb,
                       const ProtocolParams& p, const SimConfig& cfg) {
  if (cfg.reps < 1) throw std::invalid_argument("replicate: reps must be >= 1");
  const int n = m.size();
  SimAggregate agg;
  agg.reps = cfg.reps;
  agg.nodes.assign(n, {});
  agg.sources.assign(n, {});

  struct Series {
    std::vector<double> alpha, gamma, delta, q, b;
  };
  std::vector<Series> ns(n);
  std::vector<std::vector<double>> p_del(n), delay_ms(n);
  std::vector<double> sum_q;
  std::vector<int64_t> delivered_total(n, 0);

  for (int r = 0; r < cfg.reps; ++r) {
    SimRun run = simulate_once(m, nb, p, cfg, mix_seed(cfg.seed, r));
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const NodeCounters& c = run.nodes[i];
      ns[i].alpha.push_back(c.alpha_hat());
      ns[i].gamma.push_back(c.gamma_hat());
      ns[i].delta.push_back(c.delta_hat());
      const double qi = double(c.busy_symbols) / double(run.window_symbols);
      ns[i].q.push_back(qi);
      ns[i].b.push_back(c.b_hat());
      sq += qi;
      const SourceCounters& sc = run.sources[i];
      if (sc.generated || sc.delivered) {
        p_del[i].push_back(sc.p_del_hat());
        if (sc.delivered)
          delay_ms[i].push_back(units::symbols_to_ms(sc.mean_delay_symbols()));
        delivered_total[i] += sc.delivered;
      }
    }
    sum_q.push_back(sq);
  }

  auto mc = [](const std::vector<double>& xs) {
    return MeanCi{stats::mean(xs), stats::ci95_halfwidth(xs)};
  };
  for (int i = 0; i < n; ++i) {
    agg.nodes[i].alpha = mc(ns[i].alpha);
    agg.nodes[i].gamma = mc(ns[i].gamma);
    agg.nodes[i].delta = mc(ns[i].delta);
    agg.nodes[i].q = mc(ns[i].q);
    agg.nodes[i].b = mc(ns[i].b);
    agg.sources[i].p_del = mc(p_del[i]);
    agg.sources[i].delay_ms = mc(delay_ms[i]);
    agg.sources[i].delivered_total = delivered_total[i];
  }
  agg.sum_q = mc(sum_q);
  return agg;
}

}  // namespace wpan
