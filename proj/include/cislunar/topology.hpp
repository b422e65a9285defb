#pragma once

#include <string>
#include <vector>

namespace cislunar {

enum class Role { authority, dependent };

struct Node {
    std::string id;  // also the id of the clock this node carries
    Role role = Role::dependent;

    friend bool operator==(const Node&, const Node&) = default;
};

/// Half-open coordinate-time interval [start, end).
struct Window {
    double start = 0.0;
    double end = 0.0;

    bool contains(double t) const { return t >= start && t < end; }
    friend bool operator==(const Window&, const Window&) = default;
};

/// a -> b is the forward direction.
enum class Direction { forward, reverse };

struct Link {
    std::string a;
    std::string b;
    double base_delay = 0.0;
    double asymmetry = 0.0;  // added to the forward leg only
    double loss_probability = 0.0;
    std::vector<Window> disruptions;

    double delay(Direction dir) const { return dir == Direction::forward ? base_delay + asymmetry : base_delay; }
    bool disrupted(double t) const;
    bool connects(const std::string& x, const std::string& y) const {
        return (a == x && b == y) || (a == y && b == x);
    }
    /// Direction of travel for a message sent by `from`.
    Direction direction_from(const std::string& from) const {
        return from == a ? Direction::forward : Direction::reverse;
    }
    void validate() const;

    friend bool operator==(const Link&, const Link&) = default;
};

struct Topology {
    std::vector<Node> nodes;
    std::vector<Link> links;

    const Node* find_node(const std::string& id) const;
    const Link* find_link(const std::string& x, const std::string& y) const;
    std::vector<std::string> ids_with_role(Role role) const;

    friend bool operator==(const Topology&, const Topology&) = default;
};

std::string to_string(Role role);

}  // namespace cislunar
