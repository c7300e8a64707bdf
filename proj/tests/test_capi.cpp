// Exercises the shared library through its C header only.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "swcons/swcons.h"

namespace {

struct Graph {
  swc_graph* g = nullptr;
  ~Graph() { swc_graph_free(g); }
};

struct Set {
  swc_topology_set* s = nullptr;
  Set() { REQUIRE(swc_topology_set_create(&s) == SWC_OK); }
  ~Set() { swc_topology_set_free(s); }
};

struct Sched {
  swc_schedule* s = nullptr;
  ~Sched() { swc_schedule_free(s); }
};

struct Traj {
  swc_trajectory* t = nullptr;
  ~Traj() { swc_trajectory_free(t); }
};

swc_protocol linear(double h) {
  swc_protocol p{};
  p.kind = SWC_PROTOCOL_LINEAR;
  p.h = h;
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("version and error reporting") {
  CHECK(std::string(swc_version()) == "0.3.0");
  Graph g;
  CHECK(swc_graph_parse("n 2 undirected\nedge 1 3 1\n", &g.g) == SWC_ERR_INPUT);
  CHECK(g.g == nullptr);
  CHECK(std::string(swc_last_error()) == "<graph>:2: agent index out of range 1..2");
  CHECK(swc_graph_parse(nullptr, &g.g) == SWC_ERR_INPUT);
  CHECK(std::string(swc_last_error()).find("null argument") != std::string::npos);
}

TEST_CASE("last error is per thread") {
  Graph g;
  CHECK(swc_graph_parse("bogus", &g.g) == SWC_ERR_INPUT);
  const std::string mine = swc_last_error();
  std::thread other([] {
    swc_graph* h = nullptr;
    CHECK(swc_graph_parse("n 1 directed\nedge 1 1 1\n", &h) == SWC_ERR_INPUT);
    CHECK(std::string(swc_last_error()).find("self-loops") != std::string::npos);
  });
  other.join();
  CHECK(std::string(swc_last_error()) == mine);
}

TEST_CASE("graph queries") {
  const double w[9] = {0, 1, 0, 0, 0, 1, 1, 0, 0};  // a_12 = a_23 = a_31 = 1
  Graph g;
  REQUIRE(swc_graph_create(3, w, 0, &g.g) == SWC_OK);
  CHECK(swc_graph_order(g.g) == 3);
  CHECK(swc_graph_is_undirected(g.g) == 0);
  int flag = -1;
  CHECK(swc_graph_has_spanning_tree(g.g, &flag) == SWC_OK);
  CHECK(flag == 1);
  CHECK(swc_graph_is_connected(g.g, &flag) == SWC_ERR_INPUT);

  double l[9];
  REQUIRE(swc_graph_laplacian(g.g, l) == SWC_OK);
  CHECK(l[0] == 1.0);
  CHECK(l[1] == -1.0);
  CHECK(l[2] == 0.0);

  double re[3], im[3];
  REQUIRE(swc_graph_spectrum(g.g, re, im) == SWC_OK);
  CHECK(re[0] == 0.0);
  CHECK(re[1] == doctest::Approx(1.5));
  CHECK(im[1] == doctest::Approx(-std::sqrt(3.0) / 2));
  CHECK(im[2] == doctest::Approx(std::sqrt(3.0) / 2));

  double wl[3];
  REQUIRE(swc_graph_left_eigenvector(g.g, wl) == SWC_OK);
  for (double v : wl) CHECK(v == doctest::Approx(1.0 / 3));

  const double asym[4] = {0, 1, 0, 0};
  Graph bad;
  CHECK(swc_graph_create(2, asym, 1, &bad.g) == SWC_ERR_INPUT);

  const double none[4] = {0, 0, 0, 0};
  Graph iso;
  REQUIRE(swc_graph_create(2, none, 0, &iso.g) == SWC_OK);
  CHECK(swc_graph_left_eigenvector(iso.g, wl) == SWC_ERR_HYPOTHESIS);
}

TEST_CASE("topology sets") {
  Set set;
  Graph k2, k3;
  REQUIRE(swc_graph_parse("n 2 undirected\nedge 1 2 1\n", &k2.g) == SWC_OK);
  REQUIRE(swc_graph_parse("n 3 undirected\nedge 1 2 1\nedge 2 3 1\nedge 1 3 1\n", &k3.g) == SWC_OK);
  CHECK(swc_topology_set_size(set.s) == 0);
  CHECK(swc_topology_set_order(set.s) == 0);
  REQUIRE(swc_topology_set_add(set.s, "b", k2.g) == SWC_OK);
  CHECK(swc_topology_set_add(set.s, "b", k2.g) == SWC_ERR_INPUT);
  CHECK(swc_topology_set_add(set.s, "c", k3.g) == SWC_ERR_INPUT);
  CHECK(swc_topology_set_add(set.s, "has space", k2.g) == SWC_ERR_INPUT);
  REQUIRE(swc_topology_set_add(set.s, "a", k2.g) == SWC_OK);
  CHECK(swc_topology_set_size(set.s) == 2);
  CHECK(swc_topology_set_order(set.s) == 2);
  CHECK(std::string(swc_topology_set_id(set.s, 0)) == "b");
  CHECK(std::string(swc_topology_set_id(set.s, 1)) == "a");
}

TEST_CASE("schedules and the length-query buffer protocol") {
  Sched s;
  REQUIRE(swc_schedule_create(&s.s) == SWC_OK);
  REQUIRE(swc_schedule_add_ct(s.s, 1.5, "g") == SWC_OK);
  REQUIRE(swc_schedule_add_dt(s.s, 3, "g") == SWC_OK);
  CHECK(swc_schedule_add_dt(s.s, 0, "g") == SWC_ERR_INPUT);
  CHECK(swc_schedule_add_ct(s.s, -1.0, "g") == SWC_ERR_INPUT);
  CHECK(swc_schedule_segment_count(s.s) == 2);
  CHECK(swc_schedule_total_ct(s.s) == 1.5);
  CHECK(swc_schedule_total_dt(s.s) == 3);

  std::size_t len = 0;
  REQUIRE(swc_schedule_format(s.s, nullptr, 0, &len) == SWC_OK);
  CHECK(len == std::string("ct 1.5 g\ndt 3 g\n").size());
  std::vector<char> buf(len + 1);
  REQUIRE(swc_schedule_format(s.s, buf.data(), buf.size(), &len) == SWC_OK);
  CHECK(std::string(buf.data()) == "ct 1.5 g\ndt 3 g\n");
  char small[5];
  CHECK(swc_schedule_format(s.s, small, sizeof small, &len) == SWC_ERR_INPUT);
  CHECK(std::string(small) == "ct 1");

  Sched parsed;
  REQUIRE(swc_schedule_parse(buf.data(), &parsed.s) == SWC_OK);
  CHECK(swc_schedule_segment_count(parsed.s) == 2);

  swc_random_schedule_params p;
  swc_random_schedule_defaults(&p);
  CHECK(p.segments == 10);
  const char* ids[] = {"a", "b"};
  Sched r1, r2;
  REQUIRE(swc_schedule_random(9, &p, ids, 2, &r1.s) == SWC_OK);
  REQUIRE(swc_schedule_random(9, &p, ids, 2, &r2.s) == SWC_OK);
  std::vector<char> b1(4096), b2(4096);
  REQUIRE(swc_schedule_format(r1.s, b1.data(), b1.size(), &len) == SWC_OK);
  REQUIRE(swc_schedule_format(r2.s, b2.data(), b2.size(), &len) == SWC_OK);
  CHECK(std::string(b1.data()) == std::string(b2.data()));

  const auto dir = std::filesystem::temp_directory_path() / "swcons_test_capi";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "s.txt").string();
  REQUIRE(swc_schedule_save(r1.s, path.c_str()) == SWC_OK);
  CHECK(slurp(path) == std::string(b1.data()));
  Sched loaded;
  REQUIRE(swc_schedule_load(path.c_str(), &loaded.s) == SWC_OK);
  CHECK(swc_schedule_segment_count(loaded.s) == 10);
  std::filesystem::remove_all(dir);
}

TEST_CASE("certify through the C API") {
  Set set;
  Graph k3;
  REQUIRE(swc_graph_parse("n 3 undirected\nedge 1 2 1\nedge 2 3 1\nedge 1 3 1\n", &k3.g) == SWC_OK);
  REQUIRE(swc_topology_set_add(set.s, "k3", k3.g) == SWC_OK);

  swc_protocol p = linear(0.5);
  swc_certificate c{};
  REQUIRE(swc_certify(set.s, SWC_REGIME_AUTO, &p, &c) == SWC_OK);
  CHECK(c.regime == SWC_REGIME_UNDIRECTED_FIXED);
  CHECK(c.h_max == doctest::Approx(2.0 / 3));
  CHECK(c.h == 0.5);
  CHECK(c.has_dt_contraction);
  CHECK(c.dt_contraction == doctest::Approx(0.25));
  CHECK(c.has_gershgorin_h);
  CHECK(c.gershgorin_h == 0.5);
  CHECK(c.w_weighted == 0);

  p.h = 0.7;
  CHECK(swc_certify(set.s, SWC_REGIME_AUTO, &p, &c) == SWC_ERR_HYPOTHESIS);
  CHECK(std::string(swc_last_error()).find("0.666667") != std::string::npos);

  p = linear(0.0);  // auto
  REQUIRE(swc_certify(set.s, SWC_REGIME_AUTO, &p, &c) == SWC_OK);
  CHECK(c.h == doctest::Approx(0.6));

  std::size_t len = 0;
  REQUIRE(swc_certificate_format(&c, 1, nullptr, 0, &len) == SWC_OK);
  std::string json(len + 1, '\0');
  REQUIRE(swc_certificate_format(&c, 1, json.data(), json.size(), &len) == SWC_OK);
  json.resize(len);
  CHECK(json.rfind("{\"regime\":\"undirected-fixed\"", 0) == 0);

  p.kind = SWC_PROTOCOL_NONLINEAR;
  p.gamma1 = 1.0;
  p.gamma2 = 2.0;
  REQUIRE(swc_certify(set.s, SWC_REGIME_AUTO, &p, &c) == SWC_OK);
  CHECK(c.regime == SWC_REGIME_NONLINEAR_SWITCHING);
  CHECK(c.h_max == doctest::Approx(2.0 / 3 / 4));
  CHECK(c.gamma2 == 2.0);

  CHECK(std::string(swc_regime_name(SWC_REGIME_DIRECTED_FIXED)) == "directed-fixed");

  Set disc;
  Graph iso;
  REQUIRE(swc_graph_parse("n 3 undirected\nedge 1 2 1\n", &iso.g) == SWC_OK);
  REQUIRE(swc_topology_set_add(disc.s, "d", iso.g) == SWC_OK);
  p = linear(0.0);
  CHECK(swc_certify(disc.s, SWC_REGIME_AUTO, &p, &c) == SWC_ERR_HYPOTHESIS);
  CHECK(std::string(swc_last_error()).find("not connected") != std::string::npos);
}

TEST_CASE("simulate, predict and verdict through the C API") {
  Set set;
  Graph lf;
  REQUIRE(swc_graph_parse("n 2 directed\nedge 2 1 1\n", &lf.g) == SWC_OK);
  REQUIRE(swc_topology_set_add(set.s, "lf", lf.g) == SWC_OK);
  Sched s;
  REQUIRE(swc_schedule_parse("ct 3 lf\ndt 10 lf\nct 10 lf\ndt 40 lf\n", &s.s) == SWC_OK);
  const double x0[2] = {5, -3};

  double predicted = 0;
  REQUIRE(swc_predict_consensus(set.s, s.s, x0, 2, &predicted) == SWC_OK);
  CHECK(predicted == 5.0);

  swc_protocol p = linear(0.0);
  Traj t;
  REQUIRE(swc_simulate(x0, 2, s.s, set.s, &p, 0.1, &t.t) == SWC_OK);
  CHECK(swc_trajectory_h(t.t) == doctest::Approx(1.8));
  CHECK(swc_trajectory_order(t.t) == 2);
  const auto count = swc_trajectory_sample_count(t.t);
  CHECK(count == 1 + 30 + 10 + 100 + 40);

  double time = -1, x[2];
  swc_mode mode;
  REQUIRE(swc_trajectory_sample(t.t, 0, &time, x, &mode) == SWC_OK);
  CHECK(time == 0.0);
  CHECK(x[0] == 5.0);
  CHECK(mode == SWC_MODE_CT);
  REQUIRE(swc_trajectory_sample(t.t, count - 1, &time, x, nullptr) == SWC_OK);
  CHECK(time == doctest::Approx(63.0));
  CHECK(swc_trajectory_sample(t.t, count, &time, x, nullptr) == SWC_ERR_INPUT);

  swc_verdict v{};
  REQUIRE(swc_check_consensus(t.t, 1e-6, &predicted, &v) == SWC_OK);
  CHECK(v.reached);
  CHECK(v.has_achieved_value);
  CHECK(std::abs(v.achieved_value - 5.0) < 1e-6);
  CHECK(v.has_predicted_value);

  std::size_t len = 0;
  REQUIRE(swc_verdict_format(&v, nullptr, 0, &len) == SWC_OK);
  std::string text(len + 1, '\0');
  REQUIRE(swc_verdict_format(&v, text.data(), text.size(), &len) == SWC_OK);
  CHECK(text.rfind("reached = true\n", 0) == 0);

  const auto dir = std::filesystem::temp_directory_path() / "swcons_test_capi_sim";
  std::filesystem::create_directories(dir);
  REQUIRE(swc_trajectory_write_csv(t.t, (dir / "t.csv").string().c_str()) == SWC_OK);
  REQUIRE(swc_trajectory_write_series_csv(t.t, (dir / "v.csv").string().c_str()) == SWC_OK);
  CHECK(slurp(dir / "t.csv").rfind("t,mode,topology,x1,x2\n0,ct,lf,5,-3\n", 0) == 0);
  CHECK(slurp(dir / "v.csv").rfind("t,c,V\n0,1,32\n", 0) == 0);
  std::filesystem::remove_all(dir);

  Traj bad;
  const double x3[3] = {1, 2, 3};
  CHECK(swc_simulate(x3, 3, s.s, set.s, &p, 0.1, &bad.t) == SWC_ERR_INPUT);
  CHECK(bad.t == nullptr);
}

TEST_CASE("custom nonlinear coupling through a C callback") {
  Set set;
  Graph k2;
  REQUIRE(swc_graph_parse("n 2 undirected\nedge 1 2 1\n", &k2.g) == SWC_OK);
  REQUIRE(swc_topology_set_add(set.s, "k2", k2.g) == SWC_OK);
  Sched s;
  REQUIRE(swc_schedule_parse("ct 5 k2\ndt 50 k2\n", &s.s) == SWC_OK);

  int calls = 0;
  swc_protocol p{};
  p.kind = SWC_PROTOCOL_NONLINEAR;
  p.gamma1 = 1.0;
  p.gamma2 = 2.0;
  p.coupling = [](double x, void* user) {
    ++*static_cast<int*>(user);
    return x + x / (1 + std::fabs(x));
  };
  p.coupling_user = &calls;
  const double x0[2] = {0, 2};
  Traj t;
  REQUIRE(swc_simulate(x0, 2, s.s, set.s, &p, 0.0, &t.t) == SWC_OK);
  CHECK(calls > 0);
  CHECK(swc_trajectory_h(t.t) == doctest::Approx(0.9 * 0.25));
  swc_verdict v{};
  REQUIRE(swc_check_consensus(t.t, 1e-6, nullptr, &v) == SWC_OK);
  CHECK(v.reached);
  CHECK(std::abs(v.achieved_value - 1.0) < 1e-9);

  p.coupling = [](double x, void*) { return std::tanh(x); };
  p.gamma1 = 0.1;
  p.gamma2 = 1.0;
  Traj rejected;
  CHECK(swc_simulate(x0, 2, s.s, set.s, &p, 0.0, &rejected.t) == SWC_ERR_HYPOTHESIS);
  CHECK(std::string(swc_last_error()).find("coupling function rejected") != std::string::npos);
}

TEST_CASE("helpers") {
  const double x0[2] = {0, 2};
  double h = 0;
  REQUIRE(swc_sufficient_horizon(x0, 2, 1e-6, 1.0, &h) == SWC_OK);
  CHECK(h == doctest::Approx(std::log(2.0 / 0.5e-12) / 2));
  CHECK(swc_sufficient_horizon(x0, 2, 1e-6, 0.0, &h) == SWC_ERR_INPUT);

  double a[4], b[4];
  REQUIRE(swc_random_state(11, 4, -5, 5, a) == SWC_OK);
  REQUIRE(swc_random_state(11, 4, -5, 5, b) == SWC_OK);
  for (int i = 0; i < 4; ++i) {
    CHECK(a[i] == b[i]);
    CHECK(a[i] >= -5);
    CHECK(a[i] < 5);
  }
}
