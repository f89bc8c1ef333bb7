#include "mbpinn/graph.hpp"

#include <stdexcept>

namespace mbpinn::ad {

void Graph::require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(std::string("graph: ") + what);
}

const Graph::Node& Graph::at(Var v) const {
  require(v.id >= 0 && v.id < static_cast<int>(nodes_.size()), "invalid var");
  return nodes_[v.id];
}

int Graph::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

Var Graph::leaf(Eigen::Index rows, Eigen::Index cols) {
  require(rows > 0 && cols > 0, "leaf shape must be positive");
  Node n;
  n.op = Op::kLeaf;
  n.needs_grad = true;
  n.value.setZero(rows, cols);
  n.adj.setZero(rows, cols);
  int id = push(std::move(n));
  leaves_.push_back({id, param_size_});
  param_size_ += rows * cols;
  return {id};
}

Var Graph::constant(Matrix m) {
  Node n;
  n.op = Op::kConst;
  n.value = std::move(m);
  return {push(std::move(n))};
}

Graph::Node Graph::make_op(Op op, Var a, Var b, Eigen::Index rows, Eigen::Index cols) {
  Node n;
  n.op = op;
  n.in0 = a.id;
  n.in1 = b.id;
  n.needs_grad = at(a).needs_grad || (b.valid() && at(b).needs_grad);
  n.value.setZero(rows, cols);
  if (n.needs_grad) n.adj.setZero(rows, cols);
  return n;
}

Var Graph::matmul(Var a, Var b) {
  require(at(a).value.cols() == at(b).value.rows(), "matmul inner dims");
  return {push(make_op(Op::kMatMul, a, b, at(a).value.rows(), at(b).value.cols()))};
}

Var Graph::affine(Var w, Var x, Var b) {
  require(at(w).value.cols() == at(x).value.rows(), "affine inner dims");
  require(at(b).value.cols() == 1 && at(b).value.rows() == at(w).value.rows(),
          "affine bias shape");
  Node n = make_op(Op::kAffine, w, x, at(w).value.rows(), at(x).value.cols());
  n.in2 = b.id;
  n.needs_grad = n.needs_grad || at(b).needs_grad;
  if (n.needs_grad && n.adj.size() == 0) n.adj.setZero(n.value.rows(), n.value.cols());
  return {push(std::move(n))};
}

Var Graph::add(Var a, Var b) {
  require(at(a).value.rows() == at(b).value.rows() && at(a).value.cols() == at(b).value.cols(),
          "add shapes");
  return {push(make_op(Op::kAdd, a, b, at(a).value.rows(), at(a).value.cols()))};
}

Var Graph::sub(Var a, Var b) {
  require(at(a).value.rows() == at(b).value.rows() && at(a).value.cols() == at(b).value.cols(),
          "sub shapes");
  return {push(make_op(Op::kSub, a, b, at(a).value.rows(), at(a).value.cols()))};
}

Var Graph::hadamard(Var a, Var b) {
  require(at(a).value.rows() == at(b).value.rows() && at(a).value.cols() == at(b).value.cols(),
          "hadamard shapes");
  return {push(make_op(Op::kHadamard, a, b, at(a).value.rows(), at(a).value.cols()))};
}

Var Graph::scale(Var a, double factor) {
  Node n = make_op(Op::kScale, a, Var{}, at(a).value.rows(), at(a).value.cols());
  n.factor = factor;
  return {push(std::move(n))};
}

std::pair<Var, Var> Graph::sin_cos(Var a) {
  Node s = make_op(Op::kSin, a, Var{}, at(a).value.rows(), at(a).value.cols());
  int sid = push(std::move(s));
  Node c = make_op(Op::kCos, a, Var{}, at(a).value.rows(), at(a).value.cols());
  c.partner = sid;
  int cid = push(std::move(c));
  nodes_[sid].partner = cid;
  return {{sid}, {cid}};
}

Var Graph::square(Var a) {
  return {push(make_op(Op::kSquare, a, Var{}, at(a).value.rows(), at(a).value.cols()))};
}

Var Graph::sum(Var a) {
  return {push(make_op(Op::kSum, a, Var{}, 1, 1))};
}

Var Graph::concat_rows(const std::vector<Var>& parts) {
  require(!parts.empty(), "concat needs parts");
  Eigen::Index rows = 0;
  const Eigen::Index cols = at(parts[0]).value.cols();
  Node n;
  n.op = Op::kConcat;
  for (Var p : parts) {
    require(at(p).value.cols() == cols, "concat col mismatch");
    n.kids.push_back(p.id);
    n.kid_offsets.push_back(rows);
    rows += at(p).value.rows();
    n.needs_grad = n.needs_grad || at(p).needs_grad;
  }
  n.value.setZero(rows, cols);
  if (n.needs_grad) n.adj.setZero(rows, cols);
  return {push(std::move(n))};
}

void Graph::set_params(const Vector& theta) {
  require(theta.size() == param_size_, "set_params size mismatch");
  for (const LeafRef& l : leaves_) {
    Node& n = nodes_[l.node];
    n.value = Eigen::Map<const Matrix>(theta.data() + l.offset, n.value.rows(), n.value.cols());
  }
}

void Graph::forward() {
  for (Node& n : nodes_) {
    switch (n.op) {
      case Op::kLeaf:
      case Op::kConst:
        break;
      case Op::kMatMul:
        n.value.noalias() = nodes_[n.in0].value * nodes_[n.in1].value;
        break;
      case Op::kAffine:
        n.value.noalias() = nodes_[n.in0].value * nodes_[n.in1].value;
        n.value.colwise() += nodes_[n.in2].value.col(0);
        break;
      case Op::kAdd:
        n.value = nodes_[n.in0].value + nodes_[n.in1].value;
        break;
      case Op::kSub:
        n.value = nodes_[n.in0].value - nodes_[n.in1].value;
        break;
      case Op::kHadamard:
        n.value.array() = nodes_[n.in0].value.array() * nodes_[n.in1].value.array();
        break;
      case Op::kScale:
        n.value = n.factor * nodes_[n.in0].value;
        break;
      case Op::kSin:
        n.value.array() = nodes_[n.in0].value.array().sin();
        break;
      case Op::kCos:
        n.value.array() = nodes_[n.in0].value.array().cos();
        break;
      case Op::kSquare:
        n.value.array() = nodes_[n.in0].value.array().square();
        break;
      case Op::kSum:
        n.value(0, 0) = nodes_[n.in0].value.sum();
        break;
      case Op::kConcat:
        for (std::size_t k = 0; k < n.kids.size(); ++k) {
          const Matrix& kv = nodes_[n.kids[k]].value;
          n.value.middleRows(n.kid_offsets[k], kv.rows()) = kv;
        }
        break;
    }
  }
}

void Graph::backward(Var root) {
  const Node& r = at(root);
  require(r.value.rows() == 1 && r.value.cols() == 1, "backward root must be scalar");
  for (Node& n : nodes_) {
    if (n.needs_grad) n.adj.setZero();
  }
  if (!r.needs_grad) return;  // no leaf dependence; gradient is zero
  nodes_[root.id].adj(0, 0) = 1.0;

  for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.needs_grad) continue;
    auto grad_into = [&](int child) -> Node* {
      return (child >= 0 && nodes_[child].needs_grad) ? &nodes_[child] : nullptr;
    };
    switch (n.op) {
      case Op::kLeaf:
      case Op::kConst:
        break;
      case Op::kMatMul:
        if (Node* a = grad_into(n.in0)) a->adj.noalias() += n.adj * nodes_[n.in1].value.transpose();
        if (Node* b = grad_into(n.in1)) b->adj.noalias() += nodes_[n.in0].value.transpose() * n.adj;
        break;
      case Op::kAffine:
        if (Node* w = grad_into(n.in0)) w->adj.noalias() += n.adj * nodes_[n.in1].value.transpose();
        if (Node* x = grad_into(n.in1)) x->adj.noalias() += nodes_[n.in0].value.transpose() * n.adj;
        if (Node* b = grad_into(n.in2)) b->adj.col(0) += n.adj.rowwise().sum();
        break;
      case Op::kAdd:
        if (Node* a = grad_into(n.in0)) a->adj += n.adj;
        if (Node* b = grad_into(n.in1)) b->adj += n.adj;
        break;
      case Op::kSub:
        if (Node* a = grad_into(n.in0)) a->adj += n.adj;
        if (Node* b = grad_into(n.in1)) b->adj -= n.adj;
        break;
      case Op::kHadamard:
        if (Node* a = grad_into(n.in0)) a->adj.array() += n.adj.array() * nodes_[n.in1].value.array();
        if (Node* b = grad_into(n.in1)) b->adj.array() += n.adj.array() * nodes_[n.in0].value.array();
        break;
      case Op::kScale:
        if (Node* a = grad_into(n.in0)) a->adj += n.factor * n.adj;
        break;
      case Op::kSin:
        if (Node* a = grad_into(n.in0)) {
          if (n.partner >= 0) {
            a->adj.array() += n.adj.array() * nodes_[n.partner].value.array();
          } else {
            a->adj.array() += n.adj.array() * nodes_[n.in0].value.array().cos();
          }
        }
        break;
      case Op::kCos:
        if (Node* a = grad_into(n.in0)) {
          if (n.partner >= 0) {
            a->adj.array() -= n.adj.array() * nodes_[n.partner].value.array();
          } else {
            a->adj.array() -= n.adj.array() * nodes_[n.in0].value.array().sin();
          }
        }
        break;
      case Op::kSquare:
        if (Node* a = grad_into(n.in0)) {
          a->adj.array() += 2.0 * n.adj.array() * nodes_[n.in0].value.array();
        }
        break;
      case Op::kSum:
        if (Node* a = grad_into(n.in0)) a->adj.array() += n.adj(0, 0);
        break;
      case Op::kConcat:
        for (std::size_t k = 0; k < n.kids.size(); ++k) {
          if (Node* c = grad_into(n.kids[k])) {
            c->adj += n.adj.middleRows(n.kid_offsets[k], c->adj.rows());
          }
        }
        break;
    }
  }
}

void Graph::param_grad(Vector& grad) const {
  grad.resize(param_size_);
  for (const LeafRef& l : leaves_) {
    const Node& n = nodes_[l.node];
    grad.segment(l.offset, n.adj.size()) =
        Eigen::Map<const Vector>(n.adj.data(), n.adj.size());
  }
}

double Graph::scalar(Var v) const {
  const Node& n = at(v);
  require(n.value.size() == 1, "scalar() on non-scalar node");
  return n.value(0, 0);
}

std::vector<Var> make_leaves(Graph& g, const ParamLayout& layout) {
  std::vector<Var> vars;
  vars.reserve(layout.block_count());
  for (std::size_t i = 0; i < layout.block_count(); ++i) {
    const ParamBlock& b = layout.block(i);
    vars.push_back(g.leaf(b.rows, b.cols));
  }
  return vars;
}

}  // namespace mbpinn::ad
