#include "swcons/linalg.hpp"

#include <array>
#include <cmath>

#include "swcons/error.hpp"

namespace swcons {

namespace {

using Matrix = Eigen::MatrixXd;

// Backward-error thresholds theta_m for the [m/m] Padé approximant in double.
constexpr std::array<double, 4> kTheta = {1.495585217958292e-2, 2.539398330063230e-1, 9.504178996162932e-1,
                                          2.097847961257068e0};
constexpr double kTheta13 = 5.371920351148152e0;

constexpr std::array<double, 4> kB3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kB5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kB7 = {17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0};
constexpr std::array<double, 10> kB9 = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                                        2162160.0,     110880.0,     3960.0,       90.0,        1.0};
constexpr std::array<double, 14> kB13 = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                         1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                         670442572800.0,      33522128640.0,       1323241920.0,
                                         40840800.0,          960960.0,            16380.0,
                                         182.0,               1.0};

Matrix solve_pade(const Matrix& u, const Matrix& v) {
  return (v - u).partialPivLu().solve(v + u);
}

template <std::size_t N>
Matrix pade_low(const Matrix& a, const std::array<double, N>& b) {
  const auto n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  Matrix odd = b[1] * id;
  Matrix even = b[0] * id;
  Matrix power = id;
  for (std::size_t k = 2; k < N; k += 2) {
    power = power * a2;
    even += b[k] * power;
    if (k + 1 < N) odd += b[k + 1] * power;
  }
  return solve_pade(a * odd, even);
}

Matrix pade13(const Matrix& a) {
  const auto n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const auto& b = kB13;
  const Matrix u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  return solve_pade(u, v);
}

}  // namespace

Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) fail_input("expm requires a square matrix");
  if (!a.allFinite()) fail_numerical("expm: non-finite matrix entries");
  if (a.rows() == 0) return a;

  const double norm = norm1(a);
  if (norm <= kTheta[0]) return pade_low(a, kB3);
  if (norm <= kTheta[1]) return pade_low(a, kB5);
  if (norm <= kTheta[2]) return pade_low(a, kB7);
  if (norm <= kTheta[3]) return pade_low(a, kB9);

  const int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta13))));
  Matrix r = pade13(a / std::ldexp(1.0, squarings));
  for (int k = 0; k < squarings; ++k) r = r * r;
  if (!r.allFinite()) fail_numerical("expm: result overflowed");
  return r;
}

}  // namespace swcons
