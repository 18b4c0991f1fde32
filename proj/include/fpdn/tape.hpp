#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "fpdn/tensor.hpp"

namespace fpdn {

// Define-by-run compute graph, rebuilt every forward pass. Nodes are stored in
// creation order, which is a topological order by construction; backward walks
// the list once in reverse. One tape must only be used by one thread.
template <class T>
class Tape {
  public:
    struct Node {
        const char* op;
        std::vector<Var<T>> inputs;
        Var<T> output;
        std::function<void()> backward;
    };

    bool recording() const { return recording_; }
    void set_recording(bool on) { recording_ = on; }

    // Records a node if recording is on and any input carries a gradient.
    // Returns true when recorded, in which case the output is marked as
    // requiring grad (its buffer is allocated by the caller via mark).
    bool wants(const std::vector<Var<T>>& inputs) const {
        if (!recording_) return false;
        for (const auto& v : inputs)
            if (v->requires_grad) return true;
        return false;
    }

    void record(const char* op, std::vector<Var<T>> inputs, Var<T> output,
                std::function<void()> backward) {
        output->set_requires_grad();
        nodes_.push_back(Node{op, std::move(inputs), std::move(output), std::move(backward)});
    }

    size_t node_count() const { return nodes_.size(); }

    // Populates grad = d(loss)/d(leaf) for every requires_grad leaf reachable
    // from the recorded graph. Leaf gradients accumulate additively across
    // calls; intermediate grads are reset here so a rerun after zeroing the
    // leaves reproduces identical values.
    void backward(const Var<T>& loss) {
        if (!loss->is_scalar())
            throw ContractError("backward: loss must be scalar, got shape " + loss->shape_str());
        bool recorded = false;
        for (auto& n : nodes_)
            if (n.output.get() == loss.get()) {
                recorded = true;
                break;
            }
        if (!recorded)
            throw ContractError("backward: loss is not connected to a recorded graph");
        for (auto& n : nodes_) n.output->zero_grad();
        loss->grad[0] = T(1);
        for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) it->backward();
    }

    void clear() { nodes_.clear(); }

  private:
    std::vector<Node> nodes_;
    bool recording_ = true;
};

}  // namespace fpdn
