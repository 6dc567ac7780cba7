// Prints the parsed element tree of an HTML file as JSON, one entry per
// element in document order: [depth, tag, [[name, value], ...], direct text].

#include <iostream>
#include <json.hpp>

#include "similo/capture.hpp"
#include "similo/dom.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: similo_dump_tree file.html\n";
    return 2;
  }
  try {
    auto tree = similo::parse_html(similo::detail::read_file(argv[1]));
    nlohmann::json out = nlohmann::json::array();
    for (std::uint32_t i = 0; i < tree.size(); ++i) {
      similo::ElementRef el{i};
      nlohmann::json attrs = nlohmann::json::array();
      for (const auto& a : tree.attributes(el)) attrs.push_back({a.name, a.value});
      out.push_back({tree.depth(el), tree.tag(el), attrs, tree.text(el)});
    }
    std::cout << out.dump() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
