#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bbmcli {

// bad flags, unknown keys, malformed values, violated preconditions: exit 2
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class KeyKind { number, integer, boolean, text, list };

struct KeySpec {
  std::string key;   // section.name
  KeyKind kind;
  std::string def;
  std::string flag;  // command-line override, e.g. "--c2"
  std::string help;
  std::vector<std::string> choices = {};  // text keys only; empty: free text
};

const std::vector<KeySpec>& key_registry();
const KeySpec* find_key(const std::string& key);

// keys of the sections a command reads
std::vector<const KeySpec*> keys_for(const std::vector<std::string>& sections);

// one line per key: "section.name = default   help"
std::string describe_keys(const std::vector<const KeySpec*>& keys);

// Every registered key with its current value. Sources are applied in order:
// defaults, config file, --set, command flags.
class RunConfig {
 public:
  RunConfig();

  void set(const std::string& key, const std::string& value);
  // "section.key=value"
  void set_assignment(const std::string& kv);

  // .json files are JSON, anything else is the key=value format:
  //   # comment
  //   [collide]
  //   c2 = 1.05
  void load_file(const std::string& path);
  void load_text(const std::string& text, const std::string& origin = "<text>");
  void load_json(const std::string& text, const std::string& origin = "<json>");

  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  std::vector<double> list(const std::string& key) const;
  const std::string& raw(const std::string& key) const;

  // typed JSON object {section: {name: value}} for all keys
  std::string resolved_json() const;
  // the same in the key=value format; loading it reproduces this config
  std::string resolved_text() const;

 private:
  const KeySpec& spec(const std::string& key) const;
  std::map<std::string, std::string> values_;
};

double parse_number(const std::string& s, const std::string& what);
long parse_integer(const std::string& s, const std::string& what);
bool parse_boolean(const std::string& s, const std::string& what);
std::vector<double> parse_list(const std::string& s, const std::string& what);

}  // namespace bbmcli
