#pragma once

#include <utility>
#include <vector>

#include "mbpinn/param_vector.hpp"

namespace mbpinn::ad {

// Handle to a node in a Graph tape.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// A prebuilt reverse-mode tape over matrix-valued nodes.
//
// Build the structure once (shapes are frozen at build time), then reuse it:
//   set_params(theta); forward(); backward(root); param_grad(g);
// No heap allocation happens after the build, which matters because HMC and
// Adam evaluate the same graph ~10^5..10^6 times.
//
// The op set is exactly what sine-MLP forward passes plus first/second
// spatial-derivative channels need: affine maps, matmul, elementwise
// add/sub/product/scale/square, sin/cos, summation, and row concatenation.
class Graph {
 public:
  // Trainable input bound to a segment of the flat parameter vector, in
  // creation order. rows*cols entries, column-major.
  Var leaf(Eigen::Index rows, Eigen::Index cols);
  // Fixed matrix (observation points, coefficient values, unit directions...).
  Var constant(Matrix m);

  Var matmul(Var a, Var b);
  // w*x with the column vector b added to every column.
  Var affine(Var w, Var x, Var b);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var hadamard(Var a, Var b);
  Var scale(Var a, double factor);
  // Returns {sin(a), cos(a)}. Paired so each backward rule reuses the other's
  // forward value instead of recomputing the transcendental.
  std::pair<Var, Var> sin_cos(Var a);
  Var square(Var a);
  Var sum(Var a);  // 1x1
  Var concat_rows(const std::vector<Var>& parts);

  void set_params(const Vector& theta);
  void forward();
  // Seeds root (must be 1x1) with adjoint 1 and accumulates leaf adjoints.
  void backward(Var root);
  // Flattened leaf adjoints, same ordering as set_params.
  void param_grad(Vector& grad) const;

  const Matrix& value(Var v) const { return nodes_[v.id].value; }
  double scalar(Var v) const;
  bool finite(Var v) const { return nodes_[v.id].value.allFinite(); }
  Eigen::Index param_size() const { return param_size_; }
  std::size_t node_count() const { return nodes_.size(); }

 private:
  enum class Op : unsigned char {
    kLeaf, kConst, kMatMul, kAffine, kAdd, kSub,
    kHadamard, kScale, kSin, kCos, kSquare, kSum, kConcat,
  };

  struct Node {
    Op op;
    bool needs_grad = false;
    int in0 = -1, in1 = -1, in2 = -1;
    int partner = -1;  // sin <-> cos pairing
    double factor = 0.0;
    std::vector<int> kids;
    std::vector<Eigen::Index> kid_offsets;
    Matrix value;
    Matrix adj;
  };

  int push(Node n);
  Node make_op(Op op, Var a, Var b, Eigen::Index rows, Eigen::Index cols);
  const Node& at(Var v) const;
  static void require(bool cond, const char* what);

  std::vector<Node> nodes_;
  struct LeafRef {
    int node;
    Eigen::Index offset;
  };
  std::vector<LeafRef> leaves_;
  Eigen::Index param_size_ = 0;
};

// Convenience: one leaf per block of a parameter layout, in block order, so a
// flat vector laid out by `layout` binds directly via set_params.
std::vector<Var> make_leaves(Graph& g, const ParamLayout& layout);

}  // namespace mbpinn::ad
