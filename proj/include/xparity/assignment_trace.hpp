#pragma once

#include <set>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "xparity/formula.hpp"

namespace xparity {

/// Replayable log of the primitive edits that turned one formula into another.
class AssignmentTrace {
 public:
  struct Assign { Var var; bool value; };
  struct Merge { Var var; Literal into; };
  struct Flip { Var var; };
  /// Deletes the variable's literals from every clause and drops it from the variable set.
  struct RemoveVariable { Var var; };
  struct RemoveClause { Clause clause; };
  struct AddClause { Clause clause; };
  struct ReplaceClause { Clause from; Clause to; };

  using Event = std::variant<Assign, Merge, Flip, RemoveVariable, RemoveClause, AddClause, ReplaceClause>;

  void push(Event e) { events_.push_back(std::move(e)); }
  void append(const AssignmentTrace& other) {
    events_.insert(events_.end(), other.events_.begin(), other.events_.end());
  }

  const std::vector<Event>& events() const { return events_; }
  bool empty() const { return events_.empty(); }
  std::size_t size() const { return events_.size(); }

  /// True when no variable is assigned, merged or removed more than once.
  bool well_formed() const {
    std::set<Var> gone;
    for (const auto& e : events_) {
      Var v = 0;
      if (const auto* a = std::get_if<Assign>(&e)) v = a->var;
      else if (const auto* m = std::get_if<Merge>(&e)) v = m->var;
      else if (const auto* r = std::get_if<RemoveVariable>(&e)) v = r->var;
      else continue;
      if (!gone.insert(v).second) return false;
    }
    return true;
  }

  Formula replay(Formula f) const {
    for (const auto& e : events_) {
      std::visit(
          [&f](const auto& ev) {
            using T = std::decay_t<decltype(ev)>;
            if constexpr (std::is_same_v<T, Assign>) f = assign(f, ev.var, ev.value);
            else if constexpr (std::is_same_v<T, Merge>) f = merge_variables(f, ev.var, ev.into);
            else if constexpr (std::is_same_v<T, Flip>) f = flip_variable(f, ev.var);
            else if constexpr (std::is_same_v<T, RemoveVariable>) f = remove_variable(f, ev.var);
            else if constexpr (std::is_same_v<T, RemoveClause>) f = remove_clause(f, ev.clause);
            else if constexpr (std::is_same_v<T, AddClause>) f = add_clause(f, ev.clause);
            else f = add_clause(remove_clause(f, ev.from), ev.to);
          },
          e);
    }
    return f;
  }

 private:
  std::vector<Event> events_;
};

}  // namespace xparity
