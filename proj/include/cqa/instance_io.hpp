#pragma once

// Instance loading/saving: a schema file plus one CSV per relation, named
// `<RELATION>.csv` inside a data directory.  Fact ids are assigned in schema
// relation order, then CSV row order, so loads are deterministic.

#include <filesystem>
#include <fstream>

#include "csv.hpp"
#include "instance.hpp"
#include "schema_parse.hpp"
#include "value_text.hpp"

namespace cqa {

inline Instance load_instance(const Schema& schema, const std::string& data_dir) {
    Instance inst;
    inst.schema = schema;
    for (int r = 0; r < (int)schema.relations.size(); ++r) {
        const RelationDef& rel = schema.relations[r];
        std::filesystem::path path = std::filesystem::path(data_dir) / (rel.name + ".csv");
        CsvTable table = read_csv(path.string());
        if (table.header.size() != rel.attrs.size())
            throw IoError(path.string() + ": header has " + std::to_string(table.header.size()) +
                          " columns, relation " + rel.name + " has " + std::to_string(rel.attrs.size()));
        for (std::size_t a = 0; a < rel.attrs.size(); ++a)
            if (!RelationDef::iequal(table.header[a], rel.attrs[a].name))
                throw IoError(path.string() + ": header column " + std::to_string(a + 1) + " is '" +
                              table.header[a] + "', expected '" + rel.attrs[a].name + "'");
        for (std::size_t row = 0; row < table.rows.size(); ++row) {
            std::vector<Value> values;
            values.reserve(rel.attrs.size());
            for (std::size_t a = 0; a < rel.attrs.size(); ++a) {
                const AttributeDef& attr = rel.attrs[a];
                std::string context = path.string() + ": row " + std::to_string(row + 2) +
                                      ", column " + attr.name;
                values.push_back(parse_typed_value(table.rows[row][a], attr.type, attr.scale, context));
            }
            inst.add_fact(r, std::move(values));
        }
    }
    return inst;
}

inline Instance load_instance(const std::string& schema_path, const std::string& data_dir) {
    return load_instance(load_schema(schema_path), data_dir);
}

// Writes `schema.txt` plus one CSV per relation into `dir` (created if
// missing).  Round-trips through load_instance to the identical instance.
inline void write_instance(const Instance& inst, const std::string& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(std::filesystem::path(dir) / "schema.txt");
        if (!out) throw IoError("cannot write schema.txt in " + dir);
        for (const RelationDef& rel : inst.schema.relations) {
            out << "relation " << rel.name << " (";
            for (std::size_t a = 0; a < rel.attrs.size(); ++a) {
                if (a) out << ",";
                out << " " << rel.attrs[a].name << " " << attr_type_name(rel.attrs[a].type);
                if (rel.attrs[a].type == AttrType::Decimal) out << "(" << rel.attrs[a].scale << ")";
            }
            if (rel.has_key()) {
                out << ", key(";
                for (std::size_t k = 0; k < rel.key.size(); ++k) {
                    if (k) out << ", ";
                    out << rel.attrs[rel.key[k]].name;
                }
                out << ")";
            }
            out << " );\n";
        }
        for (const DenialConstraint& dc : inst.schema.dcs)
            out << "dc " << dc_source(inst.schema, dc) << ";\n";
    }
    for (int r = 0; r < (int)inst.schema.relations.size(); ++r) {
        const RelationDef& rel = inst.schema.relations[r];
        CsvTable table;
        for (const AttributeDef& a : rel.attrs) table.header.push_back(a.name);
        for (FactId id : inst.relation_facts(r)) {
            std::vector<std::string> row;
            const Fact& f = inst.fact(id);
            for (std::size_t a = 0; a < f.values.size(); ++a)
                row.push_back(format_typed_value(f.values[a], rel.attrs[a].type));
            table.rows.push_back(std::move(row));
        }
        std::ofstream out(std::filesystem::path(dir) / (rel.name + ".csv"));
        if (!out) throw IoError("cannot write " + rel.name + ".csv in " + dir);
        write_csv(out, table);
    }
}

}  // namespace cqa
