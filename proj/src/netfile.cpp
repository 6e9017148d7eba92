#include "blochnet/netfile.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace blochnet::netfile {
namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::invalid_argument("network file line " + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& s, int line) {
  double v = 0;
  size_t pos = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::invalid_argument&) {
    fail(line, "expected a number, got '" + s + "'");
  } catch (const std::out_of_range&) {
    fail(line, "number out of range: '" + s + "'");
  }
  if (pos != s.size()) fail(line, "trailing junk after number '" + s + "'");
  return v;
}

int to_int(const std::string& s, int line) {
  int v = 0;
  size_t pos = 0;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::invalid_argument&) {
    fail(line, "expected an integer, got '" + s + "'");
  } catch (const std::out_of_range&) {
    fail(line, "integer out of range: '" + s + "'");
  }
  if (pos != s.size()) fail(line, "trailing junk after integer '" + s + "'");
  return v;
}

net::SiteRef to_site(const std::string& s, int line) {
  const auto colon = s.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 >= s.size())
    fail(line, "expected chain:index, got '" + s + "'");
  return {trim(s.substr(0, colon)), to_int(trim(s.substr(colon + 1)), line)};
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream stream(s);
  std::string item;
  while (std::getline(stream, item, sep)) parts.push_back(trim(item));
  return parts;
}

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

struct Section {
  std::string name;
  int line = 0;
  std::vector<std::pair<std::string, Entry>> entries;

  Entry* find(const std::string& key) {
    for (auto& [k, e] : entries)
      if (k == key) return &e;
    return nullptr;
  }
  std::string require(const std::string& key) {
    Entry* e = find(key);
    if (!e) fail(line, "section [" + name + "] is missing key '" + key + "'");
    e->used = true;
    return e->value;
  }
  std::string optional(const std::string& key, const std::string& fallback) {
    Entry* e = find(key);
    if (!e) return fallback;
    e->used = true;
    return e->value;
  }
  int line_of(const std::string& key) {
    Entry* e = find(key);
    return e ? e->line : line;
  }
  void reject_unused() const {
    for (const auto& [k, e] : entries)
      if (!e.used) fail(e.line, "unknown key '" + k + "' in section [" + name + "]");
  }
};

void finish_section(ParsedNetwork& out, Section& sec, bool& saw_body) {
  if (sec.name.empty()) return;
  if (sec.name == "spin") {
    if (saw_body) fail(sec.line, "[spin] must come before any chain or joint section");
    if (!sec.entries.empty()) fail(sec.line, "[spin] takes no keys");
    out.spin = true;
    return;
  }
  saw_body = true;
  if (sec.name == "chain") {
    const std::string label = sec.require("label");
    const int sites = to_int(sec.require("sites"), sec.line_of("sites"));
    if (out.spin) {
      spinmap::SpinChainSpec sc{label, sites, {}};
      const std::string ex = sec.optional("exchange", "");
      if (!ex.empty()) {
        const int exline = sec.line_of("exchange");
        for (const auto& part : split(ex, ',')) sc.exchange.push_back(to_double(part, exline));
        if (sc.exchange.size() == 1 && sites > 2)
          sc.exchange.assign(static_cast<size_t>(sites - 1), sc.exchange[0]);
      }
      out.spin_network.chains.push_back(std::move(sc));
    } else {
      const double hopping =
          to_double(sec.optional("hopping", "1"), sec.line_of("hopping"));
      out.chains.push_back({label, sites, hopping});
    }
  } else if (sec.name == "joint") {
    const net::SiteRef a = to_site(sec.require("a"), sec.line_of("a"));
    const net::SiteRef b = to_site(sec.require("b"), sec.line_of("b"));
    if (out.spin) {
      const double ex = to_double(sec.require("exchange"), sec.line_of("exchange"));
      out.spin_network.joints.push_back({a, b, ex});
    } else {
      const double re =
          to_double(sec.require("amplitude_re"), sec.line_of("amplitude_re"));
      const double im =
          to_double(sec.optional("amplitude_im", "0"), sec.line_of("amplitude_im"));
      if (re == 0.0 && im == 0.0) fail(sec.line, "joint amplitude must be nonzero");
      out.joints.push_back({a, b, net::Complex{re, im}});
    }
  } else if (sec.name == "flux") {
    if (out.spin) fail(sec.line, "[flux] is not valid in a spin network file");
    FluxDecl decl;
    const std::string loop = sec.require("loop");
    const int loopline = sec.line_of("loop");
    for (const auto& part : split(loop, ',')) {
      const auto arrow = part.find('>');
      if (arrow == std::string::npos) fail(loopline, "link '" + part + "' needs the form A:50>B:1");
      decl.loop.emplace_back(to_site(trim(part.substr(0, arrow)), loopline),
                             to_site(trim(part.substr(arrow + 1)), loopline));
    }
    decl.phi = to_double(sec.require("phi"), sec.line_of("phi"));
    out.fluxes.push_back(std::move(decl));
  } else {
    fail(sec.line, "unknown section [" + sec.name + "]");
  }
  sec.reject_unused();
}

}  // namespace

ParsedNetwork parse_network_text(const std::string& text) {
  ParsedNetwork out;
  Section current;
  bool saw_body = false;
  std::stringstream stream(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      finish_section(out, current, saw_body);
      current = Section{trim(line.substr(1, line.size() - 2)), line_no, {}};
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value");
    if (current.name.empty()) fail(line_no, "key before any [section] header");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail(line_no, "empty key");
    current.entries.emplace_back(key, Entry{trim(line.substr(eq + 1)), line_no, false});
  }
  finish_section(out, current, saw_body);
  if (!saw_body) throw std::invalid_argument("network file declares no chains");
  return out;
}

ParsedNetwork parse_network_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open network file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_network_text(buffer.str());
}

net::Network realize(const ParsedNetwork& parsed, net::Gauge gauge) {
  if (parsed.spin) return spinmap::magnon_to_tbn(parsed.spin_network);
  net::Network nw = net::build_network(parsed.chains, parsed.joints);
  for (const auto& flux : parsed.fluxes) {
    std::vector<net::DirectedLink> loop;
    loop.reserve(flux.loop.size());
    for (const auto& [from, to] : flux.loop)
      loop.push_back({nw.site_index(from), nw.site_index(to)});
    nw = net::thread_loop_flux(nw, loop, flux.phi, gauge);
  }
  return nw;
}

}  // namespace blochnet::netfile
