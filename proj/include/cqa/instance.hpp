#pragma once

// Database instances: identified facts plus per-attribute lookup indexes.
//
// Fact ids are dense and 1-based; they double as SAT variable numbers in the
// encodings, so the id assignment order (schema relation order, then file/row
// order) is part of the deterministic contract.

#include <algorithm>
#include <map>
#include <unordered_map>
#include <vector>

#include "schema.hpp"

namespace cqa {

using FactId = int;  // 1-based

struct Fact {
    FactId id = 0;
    int relation = -1;
    std::vector<Value> values;
};

class Instance {
public:
    Schema schema;
    std::vector<Fact> facts;  // facts[i].id == i + 1

    const Fact& fact(FactId id) const { return facts.at(id - 1); }
    int fact_count() const { return (int)facts.size(); }

    // Appends a fact, assigning the next id.  Values are validated for arity
    // only; type checking happens at load/parse time.
    FactId add_fact(int relation, std::vector<Value> values) {
        if (relation < 0 || relation >= (int)schema.relations.size())
            throw ValidationError("fact references unknown relation");
        if (values.size() != schema.relations[relation].attrs.size())
            throw ValidationError("fact arity mismatch for relation " + schema.relations[relation].name);
        Fact f;
        f.id = (FactId)facts.size() + 1;
        f.relation = relation;
        f.values = std::move(values);
        facts.push_back(std::move(f));
        indexes_built_ = false;
        return facts.back().id;
    }

    // Fact ids per relation, ascending.
    const std::vector<FactId>& relation_facts(int relation) const {
        ensure_indexes();
        return by_relation_.at(relation);
    }

    // Fact ids of `relation` whose attribute `attr` equals `v` (ascending).
    // Returns an empty list when no fact matches.
    const std::vector<FactId>& lookup(int relation, int attr, const Value& v) const {
        ensure_indexes();
        static const std::vector<FactId> kEmpty;
        const auto& idx = attr_index_.at(relation).at(attr);
        auto it = idx.find(v);
        return it == idx.end() ? kEmpty : it->second;
    }

    void build_indexes() const { ensure_indexes(); }

private:
    void ensure_indexes() const {
        if (indexes_built_) return;
        by_relation_.assign(schema.relations.size(), {});
        attr_index_.assign(schema.relations.size(), {});
        for (std::size_t r = 0; r < schema.relations.size(); ++r)
            attr_index_[r].resize(schema.relations[r].attrs.size());
        for (const Fact& f : facts) {
            by_relation_[f.relation].push_back(f.id);
            for (std::size_t a = 0; a < f.values.size(); ++a)
                attr_index_[f.relation][a][f.values[a]].push_back(f.id);
        }
        indexes_built_ = true;
    }

    mutable bool indexes_built_ = false;
    mutable std::vector<std::vector<FactId>> by_relation_;
    mutable std::vector<std::vector<std::unordered_map<Value, std::vector<FactId>, ValueHash>>> attr_index_;
};

// ===========================================================================
// Key-equal groups
// ===========================================================================

// Maximal set of facts of one relation agreeing on the key attributes.  For a
// keyless relation every fact forms its own (trivially consistent) group.
struct KeyEqualGroup {
    int relation = -1;
    std::vector<FactId> facts;  // ascending

    bool consistent() const { return facts.size() == 1; }
};

// Groups ordered by relation, then by smallest member fact id; the group
// lists partition each relation's facts.
inline std::vector<KeyEqualGroup> key_equal_groups(const Instance& inst) {
    std::vector<KeyEqualGroup> out;
    for (int r = 0; r < (int)inst.schema.relations.size(); ++r) {
        const RelationDef& rel = inst.schema.relations[r];
        const auto& ids = inst.relation_facts(r);
        if (!rel.has_key()) {
            for (FactId id : ids) out.push_back({r, {id}});
            continue;
        }
        // map: key tuple -> members, ordered by first occurrence
        std::map<std::vector<Value>, std::size_t> seen;
        std::vector<KeyEqualGroup> groups;
        for (FactId id : ids) {
            std::vector<Value> key;
            key.reserve(rel.key.size());
            for (int pos : rel.key) key.push_back(inst.fact(id).values[pos]);
            auto it = seen.find(key);
            if (it == seen.end()) {
                seen.emplace(std::move(key), groups.size());
                groups.push_back({r, {id}});
            } else {
                groups[it->second].facts.push_back(id);
            }
        }
        std::sort(groups.begin(), groups.end(),
                  [](const KeyEqualGroup& a, const KeyEqualGroup& b) { return a.facts[0] < b.facts[0]; });
        for (auto& g : groups) out.push_back(std::move(g));
    }
    return out;
}

}  // namespace cqa
