#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>

#include "life/model.hpp"

// JSON encoding of the domain types. Encoders never emit "rev": revisions are
// store metadata. Decoders accept an optional "rev" and report problems as
// SchemaError with a JSON pointer rooted at `ptr`.
namespace life::codec {

using Json = nlohmann::json;

// Sorted keys, no insignificant whitespace, UTF-8. Invalid UTF-8 is replaced
// rather than thrown.
std::string canonical(const Json& j);

// Parses JSON text, reporting syntax errors as SchemaError at "".
Json parse(std::string_view bytes);

Json to_json(const Project& p);
Json to_json(const User& u);
Json to_json(const Sense& s);
Json to_json(const LexicalEntry& e);
Json to_json(const MediaAsset& a);
Json to_json(const Morph& m);
Json to_json(const Word& w);
Json to_json(const Utterance& u);
Json to_json(const IGTDocument& d);
Json to_json(const ValidationReport& r);

Project project_from_json(const Json& j, const std::string& ptr = "");
User user_from_json(const Json& j, const std::string& ptr = "");
LexicalEntry entry_from_json(const Json& j, const std::string& ptr = "");
MediaAsset asset_from_json(const Json& j, const std::string& ptr = "");
Utterance utterance_from_json(const Json& j, const std::string& ptr = "");
IGTDocument text_from_json(const Json& j, const std::string& ptr = "");

}  // namespace life::codec
