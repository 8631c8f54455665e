// Copyright 2026 The texcorpus Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// A small JSON-schema checker covering the keywords the shipped schemas use:
// type, properties, required, additionalProperties, items, enum, const,
// minimum, maximum, minItems, maxItems, minLength, anyOf, oneOf and local
// $ref into #/definitions. The schema texts are compiled in so the CLI does
// not depend on the source tree; schemas/*.json hold the same documents.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "texcorpus/error.hpp"

namespace texcorpus::schema {

struct Violation {
  std::string path;  // JSON pointer into the instance
  std::string message;
};

class Validator {
 public:
  explicit Validator(nlohmann::json schema) : root_(std::move(schema)) {}

  static Validator from_text(std::string_view text) {
    auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::kInvalidArgument, "schema is not JSON");
    return Validator(std::move(j));
  }

  // Validates against the root schema, or against #/definitions/<def>.
  std::optional<Violation> validate(const nlohmann::json& instance, const std::string& def = {}) const {
    const nlohmann::json* s = &root_;
    if (!def.empty()) s = &resolve("#/definitions/" + def);
    return check(*s, instance, "");
  }

  const nlohmann::json& document() const { return root_; }

 private:
  const nlohmann::json& resolve(const std::string& ref) const {
    const std::string prefix = "#/definitions/";
    if (ref.rfind(prefix, 0) != 0) throw Error(ErrorCode::kInvalidArgument, "unsupported $ref " + ref);
    auto defs = root_.find("definitions");
    if (defs == root_.end()) throw Error(ErrorCode::kInvalidArgument, "no definitions for " + ref);
    auto it = defs->find(ref.substr(prefix.size()));
    if (it == defs->end()) throw Error(ErrorCode::kInvalidArgument, "dangling $ref " + ref);
    return *it;
  }

  static bool has_type(const nlohmann::json& v, std::string_view t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "integer") return v.is_number_integer();
    if (t == "number") return v.is_number();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    return false;
  }

  static bool equal(const nlohmann::json& a, const nlohmann::json& b) {
    // 1 and 1.0 compare equal; nlohmann already does this for numbers.
    return a == b;
  }

  std::optional<Violation> check(const nlohmann::json& s, const nlohmann::json& v, const std::string& path) const {
    auto fail = [&](std::string msg) { return Violation{path.empty() ? "/" : path, std::move(msg)}; };
    if (s.is_boolean()) {
      if (!s.get<bool>()) return fail("no value allowed here");
      return std::nullopt;
    }
    if (auto r = s.find("$ref"); r != s.end()) return check(resolve(r->get<std::string>()), v, path);

    if (auto t = s.find("type"); t != s.end()) {
      bool ok = false;
      if (t->is_string()) {
        ok = has_type(v, t->get<std::string>());
      } else {
        for (const auto& e : *t) ok = ok || has_type(v, e.get<std::string>());
      }
      if (!ok) return fail("expected type " + t->dump() + ", got " + std::string(v.type_name()));
    }
    if (auto e = s.find("enum"); e != s.end()) {
      bool ok = false;
      for (const auto& c : *e) ok = ok || equal(c, v);
      if (!ok) return fail("value " + v.dump() + " not in " + e->dump());
    }
    if (auto c = s.find("const"); c != s.end() && !equal(*c, v)) {
      return fail("value " + v.dump() + " is not " + c->dump());
    }
    if (v.is_number()) {
      double x = v.get<double>();
      if (auto m = s.find("minimum"); m != s.end() && x < m->get<double>()) return fail("below minimum " + m->dump());
      if (auto m = s.find("maximum"); m != s.end() && x > m->get<double>()) return fail("above maximum " + m->dump());
    }
    if (v.is_string()) {
      if (auto m = s.find("minLength"); m != s.end() && v.get_ref<const std::string&>().size() < m->get<std::size_t>()) {
        return fail("string shorter than " + m->dump());
      }
    }
    if (v.is_array()) {
      if (auto m = s.find("minItems"); m != s.end() && v.size() < m->get<std::size_t>()) {
        return fail("fewer than " + m->dump() + " items");
      }
      if (auto m = s.find("maxItems"); m != s.end() && v.size() > m->get<std::size_t>()) {
        return fail("more than " + m->dump() + " items");
      }
      if (auto items = s.find("items"); items != s.end()) {
        for (std::size_t k = 0; k < v.size(); ++k) {
          if (auto bad = check(*items, v[k], path + "/" + std::to_string(k))) return bad;
        }
      }
    }
    if (v.is_object()) {
      if (auto req = s.find("required"); req != s.end()) {
        for (const auto& k : *req) {
          if (!v.contains(k.get<std::string>())) return fail("missing required key \"" + k.get<std::string>() + "\"");
        }
      }
      auto props = s.find("properties");
      auto extra = s.find("additionalProperties");
      for (const auto& [k, val] : v.items()) {
        std::string sub = path + "/" + k;
        if (props != s.end() && props->contains(k)) {
          if (auto bad = check((*props)[k], val, sub)) return bad;
        } else if (extra != s.end()) {
          if (extra->is_boolean() && !extra->get<bool>()) return fail("unexpected key \"" + k + "\"");
          if (extra->is_object()) {
            if (auto bad = check(*extra, val, sub)) return bad;
          }
        }
      }
    }
    if (auto any = s.find("anyOf"); any != s.end()) {
      bool ok = false;
      for (const auto& alt : *any) ok = ok || !check(alt, v, path);
      if (!ok) return fail("matches none of the anyOf alternatives");
    }
    if (auto one = s.find("oneOf"); one != s.end()) {
      int hits = 0;
      for (const auto& alt : *one) hits += check(alt, v, path) ? 0 : 1;
      if (hits != 1) return fail("matches " + std::to_string(hits) + " oneOf alternatives");
    }
    return std::nullopt;
  }

  nlohmann::json root_;
};

// ---------------------------------------------------------------------------
// Shipped schemas (kept byte-identical to schemas/*.json by a test)

inline constexpr std::string_view kPaperDocumentSchema = R"json({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "$id": "texcorpus/paper_document/1",
  "title": "texcorpus paper record",
  "type": "object",
  "required": ["paper_id", "metadata", "abstract", "preamble", "sections", "objects", "bib", "links",
               "word_count", "dangling_refs", "similar_papers", "code_links"],
  "additionalProperties": false,
  "properties": {
    "paper_id": {"type": "string", "minLength": 1},
    "metadata": {
      "type": "object",
      "required": ["title", "authors", "categories", "date"],
      "additionalProperties": false,
      "properties": {
        "title": {"type": "string"},
        "authors": {"type": "array", "items": {"type": "string"}},
        "categories": {"type": "array", "items": {"type": "string"}},
        "date": {"type": "string"}
      }
    },
    "abstract": {"type": "string"},
    "preamble": {"type": "array", "items": {"$ref": "#/definitions/paragraph"}},
    "sections": {"type": "array", "items": {"$ref": "#/definitions/section"}},
    "objects": {"type": "array", "items": {"$ref": "#/definitions/object"}},
    "bib": {"type": "array", "items": {"$ref": "#/definitions/bib_entry"}},
    "links": {"type": "array", "items": {"$ref": "#/definitions/link"}},
    "word_count": {"type": "integer", "minimum": 0},
    "dangling_refs": {"type": "array", "items": {"type": "string"}},
    "similar_papers": {"type": "array", "items": {"type": "string"}},
    "code_links": {"type": "array", "items": {"type": "string"}}
  },
  "definitions": {
    "indexed": {
      "type": "array",
      "minItems": 2,
      "maxItems": 2,
      "items": {"type": ["integer", "string"]}
    },
    "paragraph": {
      "type": "object",
      "required": ["sentences", "object_refs", "cite_marks"],
      "additionalProperties": false,
      "properties": {
        "sentences": {"type": "array", "minItems": 1, "items": {"type": "string", "minLength": 1}},
        "object_refs": {"type": "array", "items": {"$ref": "#/definitions/indexed"}},
        "cite_marks": {"type": "array", "items": {"$ref": "#/definitions/indexed"}}
      }
    },
    "section": {
      "type": "object",
      "required": ["title", "level", "paragraphs", "children"],
      "additionalProperties": false,
      "properties": {
        "title": {"type": "string"},
        "level": {"type": "integer", "minimum": 1, "maximum": 3},
        "paragraphs": {"type": "array", "items": {"$ref": "#/definitions/paragraph"}},
        "children": {"type": "array", "items": {"$ref": "#/definitions/section"}}
      }
    },
    "table_payload": {
      "type": "object",
      "required": ["grid", "linear", "equal_columns", "n_rows", "n_cols", "nested_flattened"],
      "additionalProperties": false,
      "properties": {
        "grid": {"type": "array", "items": {"type": "array", "items": {"type": "string"}}},
        "linear": {"type": "string"},
        "equal_columns": {"type": "boolean"},
        "n_rows": {"type": "integer", "minimum": 0},
        "n_cols": {"type": "integer", "minimum": 0},
        "nested_flattened": {"type": "boolean"}
      }
    },
    "object": {
      "type": "object",
      "required": ["id", "kind", "env", "label", "caption", "number", "payload", "has_content"],
      "additionalProperties": false,
      "properties": {
        "id": {"type": "string", "minLength": 1},
        "kind": {"enum": ["table", "figure", "equation", "algorithm", "theorem", "verbatim", "text"]},
        "env": {"type": "string", "minLength": 1},
        "label": {"type": ["string", "null"]},
        "caption": {"type": ["string", "null"]},
        "number": {"type": ["string", "null"]},
        "payload": {
          "anyOf": [
            {"type": "null"},
            {"$ref": "#/definitions/table_payload"},
            {
              "type": "object", "required": ["image_paths"], "additionalProperties": false,
              "properties": {"image_paths": {"type": "array", "items": {"type": "string"}}}
            },
            {
              "type": "object", "required": ["latex"], "additionalProperties": false,
              "properties": {"latex": {"type": "string"}}
            },
            {
              "type": "object", "required": ["text"], "additionalProperties": false,
              "properties": {"text": {"type": "string"}}
            }
          ]
        },
        "has_content": {"type": "boolean"}
      }
    },
    "bib_entry": {
      "type": "object",
      "required": ["key", "raw", "fields"],
      "additionalProperties": false,
      "properties": {
        "key": {"type": "string", "minLength": 1},
        "raw": {"type": "string"},
        "fields": {"type": "object", "additionalProperties": {"type": "string"}}
      }
    },
    "link": {
      "type": "object",
      "required": ["key", "id", "distance", "candidates", "title_only"],
      "additionalProperties": false,
      "properties": {
        "key": {"type": "string"},
        "id": {"anyOf": [{"type": "string", "minLength": 1}, {"const": -1}]},
        "distance": {"anyOf": [{"type": "null"}, {"type": "number", "minimum": 0, "maximum": 1}]},
        "candidates": {"type": "integer", "minimum": 0},
        "title_only": {"type": "boolean"}
      }
    }
  }
}
)json";

inline constexpr std::string_view kDescSchema = R"json({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "$id": "texcorpus/desc/1",
  "title": "texcorpus description sample",
  "type": "object",
  "required": ["paper_id", "object_id", "kind", "x", "context", "target", "span", "dual_reference"],
  "additionalProperties": false,
  "properties": {
    "paper_id": {"type": "string", "minLength": 1},
    "object_id": {"type": "string", "minLength": 1},
    "kind": {"enum": ["table", "figure", "equation", "algorithm", "theorem", "verbatim", "text"]},
    "x": {"anyOf": [{"type": "string"}, {"type": "array", "items": {"type": "string"}}]},
    "context": {"type": "array", "items": {"type": "string"}},
    "target": {"type": "string", "minLength": 1},
    "span": {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": "integer", "minimum": 0}},
    "dual_reference": {"type": "boolean"},
    "split": {"enum": ["train", "valid", "test"]}
  }
}
)json";

inline constexpr std::string_view kParaSchema = R"json({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "$id": "texcorpus/para/1",
  "title": "texcorpus paragraph sample",
  "type": "object",
  "required": ["paper_id", "abstract", "passages", "target", "coverage"],
  "additionalProperties": false,
  "properties": {
    "paper_id": {"type": "string", "minLength": 1},
    "abstract": {"type": "string"},
    "passages": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["cited_id", "text"],
        "additionalProperties": false,
        "properties": {
          "cited_id": {"type": "string", "minLength": 1},
          "text": {"type": "string", "minLength": 1}
        }
      }
    },
    "target": {"type": "string", "minLength": 1},
    "coverage": {"type": "number", "minimum": 0, "maximum": 1},
    "split": {"enum": ["train", "valid", "test"]}
  }
}
)json";

inline constexpr std::string_view kStatsSchema = R"json({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "$id": "texcorpus/stats/1",
  "title": "texcorpus corpus statistics",
  "type": "object",
  "required": ["papers", "objects", "citation_to_bib_rate", "bib_to_fulltext_rate", "cite_marks", "bib_entries",
               "bib_linked", "categories", "rejects"],
  "additionalProperties": false,
  "properties": {
    "papers": {"type": "integer", "minimum": 1},
    "objects": {
      "type": "object",
      "required": ["table", "figure", "equation", "algorithm", "theorem", "verbatim", "text"],
      "additionalProperties": {"$ref": "#/definitions/kind"}
    },
    "citation_to_bib_rate": {"$ref": "#/definitions/rate"},
    "bib_to_fulltext_rate": {"$ref": "#/definitions/rate"},
    "cite_marks": {"type": "integer", "minimum": 0},
    "bib_entries": {"type": "integer", "minimum": 0},
    "bib_linked": {"type": "integer", "minimum": 0},
    "categories": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0}},
    "rejects": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0}}
  },
  "definitions": {
    "rate": {"anyOf": [{"type": "null"}, {"type": "number", "minimum": 0, "maximum": 100}]},
    "kind": {
      "type": "object",
      "required": ["count", "with_content", "percentage"],
      "additionalProperties": false,
      "properties": {
        "count": {"type": "integer", "minimum": 0},
        "with_content": {"type": "integer", "minimum": 0},
        "percentage": {"$ref": "#/definitions/rate"}
      }
    }
  }
}
)json";

inline constexpr std::string_view kLogsSchema = R"json({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "$id": "texcorpus/logs/1",
  "title": "texcorpus batch log lines",
  "definitions": {
    "reject": {
      "type": "object",
      "required": ["paper_id", "reason", "word_count"],
      "additionalProperties": false,
      "properties": {
        "paper_id": {"type": "string", "minLength": 1},
        "reason": {"enum": ["too_short", "too_long", "no_sections"]},
        "word_count": {"type": "integer", "minimum": 0}
      }
    },
    "error": {
      "type": "object",
      "required": ["paper_id", "stage", "message"],
      "additionalProperties": false,
      "properties": {
        "paper_id": {"type": "string"},
        "stage": {"enum": ["ingest", "parse", "classify", "postprocess", "link", "derive"]},
        "code": {"type": "string"},
        "message": {"type": "string"}
      }
    },
    "warning": {
      "type": "object",
      "required": ["paper_id", "message"],
      "additionalProperties": false,
      "properties": {
        "paper_id": {"type": "string"},
        "message": {"type": "string"}
      }
    }
  }
}
)json";

inline std::string_view schema_text(std::string_view name) {
  if (name == "paper_document") return kPaperDocumentSchema;
  if (name == "desc") return kDescSchema;
  if (name == "para") return kParaSchema;
  if (name == "stats") return kStatsSchema;
  if (name == "logs") return kLogsSchema;
  throw Error(ErrorCode::kInvalidArgument, "unknown schema " + std::string(name));
}

inline const Validator& shipped(std::string_view name) {
  static const Validator paper = Validator::from_text(kPaperDocumentSchema);
  static const Validator desc = Validator::from_text(kDescSchema);
  static const Validator para = Validator::from_text(kParaSchema);
  static const Validator stats = Validator::from_text(kStatsSchema);
  static const Validator logs = Validator::from_text(kLogsSchema);
  if (name == "paper_document") return paper;
  if (name == "desc") return desc;
  if (name == "para") return para;
  if (name == "stats") return stats;
  if (name == "logs") return logs;
  throw Error(ErrorCode::kInvalidArgument, "unknown schema " + std::string(name));
}

}  // namespace texcorpus::schema
