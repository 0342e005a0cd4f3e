#include "gapbench/path_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>

#include "gapbench/errors.hpp"

namespace gapbench {
namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr int kUnvisited = std::numeric_limits<int>::max();

struct Move {
    int dx, dy;
    bool diagonal;
};
constexpr std::array<Move, 8> kMoves{{{1, 0, false}, {-1, 0, false}, {0, 1, false}, {0, -1, false},
                                      {1, 1, true}, {1, -1, true}, {-1, 1, true}, {-1, -1, true}}};

// Exact cost in units of cell_size: straight + diagonal * sqrt(2).
struct Cost {
    int straight = kUnvisited;
    int diagonal = 0;

    [[nodiscard]] bool visited() const { return straight != kUnvisited; }
    [[nodiscard]] double value() const { return straight + diagonal * kSqrt2; }
    [[nodiscard]] Cost plus(bool diag) const {
        return diag ? Cost{straight, diagonal + 1} : Cost{straight + 1, diagonal};
    }
};

std::pair<int, int> free_cell(const OccupancyGrid& grid, const Vec2& p, const char* what) {
    const auto cell = grid.cell_of(p);
    if (!cell) throw DomainError(std::string(what) + " lies outside the grid");
    if (grid.is_occupied(cell->first, cell->second))
        throw DomainError(std::string(what) + " lies on an occupied cell");
    return *cell;
}

bool move_allowed(const OccupancyGrid& grid, int x, int y, const Move& m) {
    if (grid.is_occupied(x + m.dx, y + m.dy)) return false;
    if (m.diagonal && (grid.is_occupied(x + m.dx, y) || grid.is_occupied(x, y + m.dy))) return false;
    return true;
}

double octile(int dx, int dy) {
    const int ax = std::abs(dx), ay = std::abs(dy);
    return std::max(ax, ay) - std::min(ax, ay) + std::min(ax, ay) * kSqrt2;
}

}  // namespace

double octile_length(double cell_size, int straight_moves, int diagonal_moves) {
    return cell_size * (straight_moves + diagonal_moves * kSqrt2);
}

PathResult shortest_free_path(const OccupancyGrid& grid, const Vec2& start, const Vec2& goal) {
    const auto [sx, sy] = free_cell(grid, start, "start");
    const auto [gx, gy] = free_cell(grid, goal, "goal");
    const std::size_t n = grid.occupied.size();
    std::vector<Cost> cost(n);
    std::vector<std::int64_t> parent(n, -1);
    std::vector<std::uint8_t> closed(n, 0);

    struct Entry {
        double f;
        double h;
        std::size_t index;
        bool operator>(const Entry& o) const {
            if (f != o.f) return f > o.f;
            if (h != o.h) return h > o.h;
            return index > o.index;
        }
    };
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

    const std::size_t s = grid.index(sx, sy);
    const std::size_t g = grid.index(gx, gy);
    cost[s] = Cost{0, 0};
    open.push({octile(gx - sx, gy - sy), octile(gx - sx, gy - sy), s});

    while (!open.empty()) {
        const Entry top = open.top();
        open.pop();
        if (closed[top.index]) continue;
        closed[top.index] = 1;
        if (top.index == g) break;
        const int x = static_cast<int>(top.index % static_cast<std::size_t>(grid.width));
        const int y = static_cast<int>(top.index / static_cast<std::size_t>(grid.width));
        for (const Move& m : kMoves) {
            if (!move_allowed(grid, x, y, m)) continue;
            const std::size_t nb = grid.index(x + m.dx, y + m.dy);
            const Cost next = cost[top.index].plus(m.diagonal);
            if (cost[nb].visited() && !(next.value() < cost[nb].value())) continue;
            cost[nb] = next;
            parent[nb] = static_cast<std::int64_t>(top.index);
            closed[nb] = 0;  // reopen on improvement
            const double h = octile(gx - (x + m.dx), gy - (y + m.dy));
            open.push({next.value() + h, h, nb});
        }
    }
    if (!cost[g].visited()) throw UnreachableError();

    PathResult result;
    result.straight_moves = cost[g].straight;
    result.diagonal_moves = cost[g].diagonal;
    result.d_min = octile_length(grid.cell_size, cost[g].straight, cost[g].diagonal);
    for (std::int64_t at = static_cast<std::int64_t>(g); at >= 0; at = parent[static_cast<std::size_t>(at)]) {
        const auto idx = static_cast<std::size_t>(at);
        result.waypoints.push_back(grid.cell_center(static_cast<int>(idx % static_cast<std::size_t>(grid.width)),
                                                    static_cast<int>(idx / static_cast<std::size_t>(grid.width))));
        if (idx == s) break;
    }
    std::reverse(result.waypoints.begin(), result.waypoints.end());
    return result;
}

double dijkstra_reference(const OccupancyGrid& grid, const Vec2& start, const Vec2& goal) {
    const auto [sx, sy] = free_cell(grid, start, "start");
    const auto [gx, gy] = free_cell(grid, goal, "goal");
    std::vector<Cost> cost(grid.occupied.size());
    std::vector<std::uint8_t> done(grid.occupied.size(), 0);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    const std::size_t s = grid.index(sx, sy);
    const std::size_t g = grid.index(gx, gy);
    cost[s] = Cost{0, 0};
    queue.push({0.0, s});
    while (!queue.empty()) {
        const auto [d, at] = queue.top();
        queue.pop();
        if (done[at]) continue;
        done[at] = 1;
        if (at == g) return octile_length(grid.cell_size, cost[g].straight, cost[g].diagonal);
        const int x = static_cast<int>(at % static_cast<std::size_t>(grid.width));
        const int y = static_cast<int>(at / static_cast<std::size_t>(grid.width));
        for (const Move& m : kMoves) {
            if (!move_allowed(grid, x, y, m)) continue;
            const std::size_t nb = grid.index(x + m.dx, y + m.dy);
            if (done[nb]) continue;
            const Cost next = cost[at].plus(m.diagonal);
            if (!cost[nb].visited() || next.value() < cost[nb].value()) {
                cost[nb] = next;
                queue.push({next.value(), nb});
            }
        }
    }
    throw UnreachableError();
}

}  // namespace gapbench
