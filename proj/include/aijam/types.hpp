#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace aijam {

using Vec4 = Eigen::Matrix<double, 4, 1>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Vec3 = Eigen::Vector3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

// [I, Q, dI, dQ]
using GeneralizedState = Vec4;

using Rng = std::mt19937_64;

struct Gaussian {
    Vec4 mean = Vec4::Zero();
    Mat4 cov = Mat4::Identity();
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Independent stream `stream` derived from a run seed.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

double standard_normal(Rng& rng);
double uniform01(Rng& rng);
int uniform_int(Rng& rng, int lo, int hi);  // inclusive

void warn(const std::string& message);
void set_warnings_enabled(bool enabled);

}  // namespace aijam
