#include "mbpinn/network.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mbpinn::nets {

namespace {

constexpr double kPi = std::numbers::pi;

void fill_normal(double* data, Eigen::Index n, double std, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std);
  for (Eigen::Index i = 0; i < n; ++i) data[i] = normal(rng);
}

}  // namespace

void validate(const NetworkSpec& spec) {
  if (spec.input_dim < 1) throw std::invalid_argument("network: input_dim must be >= 1");
  if (spec.output_dim != 1) throw std::invalid_argument("network: only scalar outputs supported");
  if (spec.hidden_widths.empty()) throw std::invalid_argument("network: hidden_widths empty");
  for (Eigen::Index w : spec.hidden_widths) {
    if (w < 1) throw std::invalid_argument("network: hidden widths must be positive");
  }
  if (spec.kind == Kind::kPlain && !spec.pipelines.empty()) {
    throw std::invalid_argument("network: plain kind takes no pipelines");
  }
  if (spec.kind == Kind::kFourier) {
    if (spec.pipelines.empty()) throw std::invalid_argument("network: fourier kind needs >= 1 pipeline");
    for (const FourierPipelineSpec& p : spec.pipelines) {
      if (p.lambda_std <= 0) throw std::invalid_argument("network: lambda_std must be positive");
      if (p.lambda_rows != 0 && p.lambda_rows != spec.hidden_widths[0]) {
        throw std::invalid_argument("network: lambda_rows must equal the first hidden width");
      }
    }
  }
}

Network make_network(NetworkSpec spec) {
  validate(spec);
  Network net;
  net.spec = std::move(spec);
  NetworkSpec& s = net.spec;

  auto weight = [&](const std::string& name, Eigen::Index rows, Eigen::Index fan_in) {
    net.layout.add(name, rows, fan_in);
    net.init_std.push_back(std::sqrt(1.0 / static_cast<double>(fan_in)));
  };
  auto bias = [&](const std::string& name, Eigen::Index rows) {
    net.layout.add(name, rows, 1);
    net.init_std.push_back(0.0);
  };

  if (s.kind == Kind::kPlain) {
    Eigen::Index prev = s.input_dim;
    for (std::size_t l = 0; l < s.hidden_widths.size(); ++l) {
      const std::string tag = std::to_string(l + 1);
      weight("W" + tag, s.hidden_widths[l], prev);
      bias("b" + tag, s.hidden_widths[l]);
      prev = s.hidden_widths[l];
    }
    weight("Wout", s.output_dim, prev);
    bias("bout", s.output_dim);
    return net;
  }

  const Eigen::Index m = s.hidden_widths[0];
  Eigen::Index pipe_out = 0;
  for (std::size_t n = 0; n < s.pipelines.size(); ++n) {
    s.pipelines[n].lambda_rows = m;
    const std::string pre = "p" + std::to_string(n + 1) + ".";
    weight(pre + "Wlin", m, s.input_dim);
    bias(pre + "blin", m);
    Eigen::Index prev = 3 * m;  // [Lin; cos; sin]
    for (std::size_t l = 1; l < s.hidden_widths.size(); ++l) {
      const std::string tag = std::to_string(l + 1);
      weight(pre + "W" + tag, s.hidden_widths[l], prev);
      bias(pre + "b" + tag, s.hidden_widths[l]);
      prev = s.hidden_widths[l];
    }
    pipe_out = prev;
  }
  weight("Wout", s.output_dim, pipe_out * static_cast<Eigen::Index>(s.pipelines.size()));
  bias("bout", s.output_dim);
  return net;
}

Vector init_params(Network& net, Rng& rng) {
  for (FourierPipelineSpec& p : net.spec.pipelines) {
    p.lambda_matrix.resize(p.lambda_rows, net.spec.input_dim);
    fill_normal(p.lambda_matrix.data(), p.lambda_matrix.size(), p.lambda_std, rng);
  }
  Vector theta = Vector::Zero(net.layout.total_size());
  for (std::size_t i = 0; i < net.layout.block_count(); ++i) {
    const ParamBlock& b = net.layout.block(i);
    if (net.init_std[i] > 0) {
      fill_normal(theta.data() + b.offset, b.size(), net.init_std[i], rng);
    }
  }
  return theta;
}

Vector fourier_features(const Vector& x, const FourierPipelineSpec& pipeline,
                        const Matrix& w_lin, const Vector& b_lin) {
  if (pipeline.lambda_matrix.size() == 0) {
    throw std::invalid_argument("network: pipeline lambda not initialized");
  }
  const Eigen::Index m = pipeline.lambda_matrix.rows();
  const Vector b = kPi * (pipeline.lambda_matrix * x);
  Vector zeta(3 * m);
  zeta.head(m) = w_lin * x + b_lin;
  zeta.segment(m, m) = b.array().cos();
  zeta.tail(m) = b.array().sin();
  return zeta;
}

namespace {

// Cursor over layout blocks; keeps straight-line evaluation and graph
// building in lockstep with the block order chosen in make_network.
struct BlockCursor {
  const Network& net;
  const Vector& theta;
  std::size_t i = 0;
  Eigen::Map<const Matrix> next() {
    if (theta.size() != net.layout.total_size()) {
      throw std::invalid_argument("network: parameter vector does not match layout");
    }
    return net.layout.view(theta, i++);
  }
};

}  // namespace

double forward(const Network& net, const Vector& theta, const Vector& x) {
  if (x.size() != net.spec.input_dim) throw std::invalid_argument("network: bad input size");
  BlockCursor cur{net, theta};
  if (net.spec.kind == Kind::kPlain) {
    Vector h = x;
    for (std::size_t l = 0; l < net.spec.hidden_widths.size(); ++l) {
      auto w = cur.next();
      auto b = cur.next();
      h = ((w * h + b.col(0)).array().sin()).matrix();
    }
    auto wo = cur.next();
    auto bo = cur.next();
    return (wo * h)(0) + bo(0, 0);
  }
  const std::size_t layers = net.spec.hidden_widths.size();
  Vector stacked(net.layout.block_named("Wout").cols);
  Eigen::Index at = 0;
  for (const FourierPipelineSpec& p : net.spec.pipelines) {
    auto w_lin = cur.next();
    auto b_lin = cur.next();
    Vector h = fourier_features(x, p, w_lin, b_lin.col(0));
    for (std::size_t l = 1; l < layers; ++l) {
      auto w = cur.next();
      auto b = cur.next();
      h = ((w * h + b.col(0)).array().sin()).matrix();
    }
    stacked.segment(at, h.size()) = h;
    at += h.size();
  }
  auto wo = cur.next();
  auto bo = cur.next();
  return (wo * stacked)(0) + bo(0, 0);
}

namespace {

// One point's jet state: value h plus per-coordinate first/second derivative
// columns (width x d each).
struct JetState {
  Vector h;
  Matrix h1;
  Matrix h2;
};

JetState jet_affine(const Eigen::Map<const Matrix>& w, const Eigen::Map<const Matrix>& b,
                    const JetState& in) {
  JetState out;
  out.h = w * in.h + b.col(0);
  out.h1 = w * in.h1;
  out.h2 = w * in.h2;
  return out;
}

JetState jet_sine(const JetState& z) {
  JetState out;
  const Eigen::ArrayXd s = z.h.array().sin();
  const Eigen::ArrayXd c = z.h.array().cos();
  out.h = s.matrix();
  out.h1 = (z.h1.array().colwise() * c).matrix();
  out.h2 = (z.h2.array().colwise() * c - z.h1.array().square().colwise() * s).matrix();
  return out;
}

}  // namespace

JetValue eval_with_spatial_derivs(const Network& net, const Vector& theta, const Vector& x) {
  if (x.size() != net.spec.input_dim) throw std::invalid_argument("network: bad input size");
  const Eigen::Index d = net.spec.input_dim;
  BlockCursor cur{net, theta};

  auto run_fcn = [&](JetState state, std::size_t first_layer) {
    for (std::size_t l = first_layer; l < net.spec.hidden_widths.size(); ++l) {
      auto w = cur.next();
      auto b = cur.next();
      state = jet_sine(jet_affine(w, b, state));
    }
    return state;
  };

  JetState top;
  if (net.spec.kind == Kind::kPlain) {
    JetState in{x, Matrix::Identity(d, d), Matrix::Zero(d, d)};
    top = run_fcn(std::move(in), 0);
  } else {
    const Eigen::Index m = net.spec.hidden_widths[0];
    std::vector<JetState> pipes;
    for (const FourierPipelineSpec& p : net.spec.pipelines) {
      if (p.lambda_matrix.size() == 0) {
        throw std::invalid_argument("network: pipeline lambda not initialized");
      }
      auto w_lin = cur.next();
      auto b_lin = cur.next();
      const Matrix pl = kPi * p.lambda_matrix;  // m x d
      const Eigen::ArrayXd bv = (pl * x).array();
      const Eigen::ArrayXd cb = bv.cos();
      const Eigen::ArrayXd sb = bv.sin();
      JetState zeta;
      zeta.h.resize(3 * m);
      zeta.h << (w_lin * x + b_lin.col(0)), cb.matrix(), sb.matrix();
      zeta.h1.resize(3 * m, d);
      zeta.h1 << Matrix(w_lin), (pl.array().colwise() * (-sb)).matrix(),
          (pl.array().colwise() * cb).matrix();
      zeta.h2.resize(3 * m, d);
      zeta.h2 << Matrix::Zero(m, d), (pl.array().square().colwise() * (-cb)).matrix(),
          (pl.array().square().colwise() * (-sb)).matrix();
      pipes.push_back(run_fcn(std::move(zeta), 1));
    }
    const Eigen::Index pw = pipes[0].h.size();
    top.h.resize(pw * static_cast<Eigen::Index>(pipes.size()));
    top.h1.resize(top.h.size(), d);
    top.h2.resize(top.h.size(), d);
    for (std::size_t n = 0; n < pipes.size(); ++n) {
      top.h.segment(n * pw, pw) = pipes[n].h;
      top.h1.middleRows(n * pw, pw) = pipes[n].h1;
      top.h2.middleRows(n * pw, pw) = pipes[n].h2;
    }
  }

  auto wo = cur.next();
  auto bo = cur.next();
  JetValue out;
  out.value = (wo * top.h)(0) + bo(0, 0);
  out.d1 = (wo * top.h1).row(0);
  out.d2 = (wo * top.h2).row(0);
  out.finite = std::isfinite(out.value) && out.d1.allFinite() && out.d2.allFinite();
  return out;
}

namespace {

// A derivative channel in the batched graph; `zero` marks channels that are
// identically zero so no tape node is spent on them.
struct Chan {
  ad::Var v;
  bool zero = false;
};

struct BatchState {
  ad::Var h;
  std::vector<Chan> h1;
  std::vector<Chan> h2;
};

BatchState batch_layer(ad::Graph& g, ad::Var w, ad::Var b, const BatchState& in) {
  BatchState out;
  ad::Var z = g.affine(w, in.h, b);
  std::vector<Chan> z1(in.h1.size()), z2(in.h2.size());
  for (std::size_t i = 0; i < in.h1.size(); ++i) {
    z1[i] = in.h1[i].zero ? Chan{{}, true} : Chan{g.matmul(w, in.h1[i].v), false};
    z2[i] = in.h2[i].zero ? Chan{{}, true} : Chan{g.matmul(w, in.h2[i].v), false};
  }
  auto [s, c] = g.sin_cos(z);
  out.h = s;
  out.h1.resize(z1.size());
  out.h2.resize(z2.size());
  for (std::size_t i = 0; i < z1.size(); ++i) {
    out.h1[i] = z1[i].zero ? Chan{{}, true} : Chan{g.hadamard(c, z1[i].v), false};
    if (z1[i].zero && z2[i].zero) {
      out.h2[i] = Chan{{}, true};
    } else if (z1[i].zero) {
      out.h2[i] = Chan{g.hadamard(c, z2[i].v), false};
    } else {
      ad::Var curv = g.hadamard(s, g.square(z1[i].v));
      out.h2[i] = z2[i].zero ? Chan{g.scale(curv, -1.0), false}
                             : Chan{g.sub(g.hadamard(c, z2[i].v), curv), false};
    }
  }
  return out;
}

}  // namespace

BatchEval build_batch_eval(ad::Graph& g, const Network& net,
                           const std::vector<ad::Var>& leaves, const Matrix& points,
                           bool with_jets) {
  if (points.rows() != net.spec.input_dim) {
    throw std::invalid_argument("network: points must be input_dim x n");
  }
  if (leaves.size() != net.layout.block_count()) {
    throw std::invalid_argument("network: leaves do not match layout");
  }
  const Eigen::Index d = net.spec.input_dim;
  const Eigen::Index n = points.cols();
  const std::size_t jet_dims = with_jets ? static_cast<std::size_t>(d) : 0;
  std::size_t li = 0;
  auto next = [&]() { return leaves[li++]; };

  ad::Var xc = g.constant(points);
  std::vector<ad::Var> unit_dirs;
  for (std::size_t i = 0; i < jet_dims; ++i) {
    Matrix e = Matrix::Zero(d, n);
    e.row(static_cast<Eigen::Index>(i)).setOnes();
    unit_dirs.push_back(g.constant(std::move(e)));
  }

  auto run_fcn = [&](BatchState state, std::size_t first_layer) {
    for (std::size_t l = first_layer; l < net.spec.hidden_widths.size(); ++l) {
      ad::Var w = next();
      ad::Var b = next();
      state = batch_layer(g, w, b, state);
    }
    return state;
  };

  std::vector<BatchState> pipes;
  if (net.spec.kind == Kind::kPlain) {
    BatchState in;
    in.h = xc;
    for (std::size_t i = 0; i < jet_dims; ++i) {
      in.h1.push_back({unit_dirs[i], false});
      in.h2.push_back({{}, true});
    }
    pipes.push_back(run_fcn(std::move(in), 0));
  } else {
    const Eigen::Index m = net.spec.hidden_widths[0];
    for (const FourierPipelineSpec& p : net.spec.pipelines) {
      if (p.lambda_matrix.size() == 0) {
        throw std::invalid_argument("network: pipeline lambda not initialized");
      }
      ad::Var w_lin = next();
      ad::Var b_lin = next();
      const Matrix pl = kPi * p.lambda_matrix;
      const Matrix bmat = pl * points;                   // m x n
      const Matrix cosb = bmat.array().cos().matrix();
      const Matrix sinb = bmat.array().sin().matrix();
      ad::Var lin = g.affine(w_lin, xc, b_lin);
      BatchState zeta;
      zeta.h = g.concat_rows({lin, g.constant(cosb), g.constant(sinb)});
      for (std::size_t i = 0; i < jet_dims; ++i) {
        const Eigen::ArrayXd freq = pl.col(static_cast<Eigen::Index>(i)).array();
        Matrix c1 = (-(sinb.array().colwise() * freq)).matrix();
        Matrix s1 = (cosb.array().colwise() * freq).matrix();
        ad::Var lin1 = g.matmul(w_lin, unit_dirs[i]);
        zeta.h1.push_back({g.concat_rows({lin1, g.constant(std::move(c1)),
                                          g.constant(std::move(s1))}),
                           false});
        Matrix z2(3 * m, n);
        z2.topRows(m).setZero();
        z2.middleRows(m, m) = -(cosb.array().colwise() * freq.square());
        z2.bottomRows(m) = -(sinb.array().colwise() * freq.square());
        zeta.h2.push_back({g.constant(std::move(z2)), false});
      }
      pipes.push_back(run_fcn(std::move(zeta), 1));
    }
  }

  BatchState top;
  if (pipes.size() == 1) {
    top = std::move(pipes[0]);
  } else {
    std::vector<ad::Var> hs;
    for (const BatchState& p : pipes) hs.push_back(p.h);
    top.h = g.concat_rows(hs);
    for (std::size_t i = 0; i < jet_dims; ++i) {
      std::vector<ad::Var> v1, v2;
      for (const BatchState& p : pipes) {
        v1.push_back(p.h1[i].v);
        v2.push_back(p.h2[i].v);
      }
      top.h1.push_back({g.concat_rows(v1), false});
      top.h2.push_back({g.concat_rows(v2), false});
    }
  }

  ad::Var wo = next();
  ad::Var bo = next();
  BatchEval out;
  out.value = g.affine(wo, top.h, bo);
  for (std::size_t i = 0; i < jet_dims; ++i) {
    out.d1.push_back(top.h1[i].zero ? g.constant(Matrix::Zero(1, n))
                                    : g.matmul(wo, top.h1[i].v));
    out.d2.push_back(top.h2[i].zero ? g.constant(Matrix::Zero(1, n))
                                    : g.matmul(wo, top.h2[i].v));
  }
  return out;
}

}  // namespace mbpinn::nets
