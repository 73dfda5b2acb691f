#include "btl/graph.hpp"

#include <algorithm>

namespace btl {

ComparisonGraph build_comparison_graph(const ComparisonData& data) {
    validate(data);
    const int d = data.d;
    ComparisonGraph g;
    g.d = d;
    g.directed.assign(d, {});
    g.mutual.assign(d, {});
    g.observed.assign(d, {});
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if (i != j && data.wins[i][j] > 0) g.directed[i].push_back(j);
        }
    }
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            if (data.counts[i][j] > 0) {
                g.observed[i].push_back(j);
                g.observed[j].push_back(i);
                if (data.wins[i][j] > 0 && data.wins[j][i] > 0) {
                    g.mutual[i].push_back(j);
                    g.mutual[j].push_back(i);
                }
            }
        }
    }
    return g;
}

std::vector<std::vector<int>> strongly_connected_components(
    const std::vector<std::vector<int>>& adjacency) {
    const int n = static_cast<int>(adjacency.size());
    std::vector<int> index(n, -1);
    std::vector<int> lowlink(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<int> component_stack;
    component_stack.reserve(n);
    std::vector<std::vector<int>> components;

    struct Frame {
        int vertex;
        std::size_t edge;
    };
    std::vector<Frame> frames;
    int next_index = 0;

    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        frames.push_back({root, 0});
        while (!frames.empty()) {
            Frame& frame = frames.back();
            const int v = frame.vertex;
            if (frame.edge == 0) {
                index[v] = lowlink[v] = next_index++;
                component_stack.push_back(v);
                on_stack[v] = 1;
            }
            bool descended = false;
            while (frame.edge < adjacency[v].size()) {
                const int w = adjacency[v][frame.edge++];
                if (index[w] == -1) {
                    frames.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) lowlink[v] = std::min(lowlink[v], index[w]);
            }
            if (descended) continue;
            if (lowlink[v] == index[v]) {
                std::vector<int> component;
                int w;
                do {
                    w = component_stack.back();
                    component_stack.pop_back();
                    on_stack[w] = 0;
                    component.push_back(w);
                } while (w != v);
                components.push_back(std::move(component));
            }
            frames.pop_back();
            if (!frames.empty()) {
                lowlink[frames.back().vertex] =
                    std::min(lowlink[frames.back().vertex], lowlink[v]);
            }
        }
    }
    return components;
}

bool is_strongly_connected(const ComparisonGraph& g) {
    if (g.d <= 1) return true;
    return strongly_connected_components(g.directed).size() == 1;
}

bool is_connected_undirected(const ComparisonGraph& g) {
    if (g.d <= 1) return true;
    std::vector<char> seen(g.d, 0);
    std::vector<int> queue{0};
    seen[0] = 1;
    int visited = 1;
    while (!queue.empty()) {
        const int v = queue.back();
        queue.pop_back();
        for (int w : g.observed[v]) {
            if (!seen[w]) {
                seen[w] = 1;
                ++visited;
                queue.push_back(w);
            }
        }
    }
    return visited == g.d;
}

}  // namespace btl
