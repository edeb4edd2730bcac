#include "membranes/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace membranes {

namespace {

const char *class_name(NodeClass c) {
  switch (c) {
    case NodeClass::Interior: return "interior";
    case NodeClass::Boundary: return "boundary";
    case NodeClass::Exterior: return "exterior";
  }
  return "?";
}

NodeClass class_from_name(const std::string &s) {
  if (s == "interior") return NodeClass::Interior;
  if (s == "boundary") return NodeClass::Boundary;
  if (s == "exterior") return NodeClass::Exterior;
  throw std::invalid_argument("read_stack: unknown node class '" + s + "'");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_stack_csv(const std::string &path, const MembraneStack &stack) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("write_stack_csv: cannot open " + path);
  out << "x,y,class";
  for (int j = 1; j <= stack.N; ++j) out << ",u_" << j;
  out << "\n";
  const GridDomain &d = *stack.dom;
  for (int iy = 0; iy < d.n; ++iy) {
    for (int ix = 0; ix < d.n; ++ix) {
      out << fmt(d.x(ix)) << ',' << fmt(d.y(iy)) << ','
          << class_name(d.node_class(ix, iy));
      for (int j = 0; j < stack.N; ++j) out << ',' << fmt(stack.u[j].at(ix, iy));
      out << "\n";
    }
  }
}

void write_stack_header(const std::string &path, const MembraneStack &stack,
                        const Forcing &forcing) {
  nlohmann::ordered_json h;
  h["n"] = stack.dom->n;
  h["R"] = stack.dom->R;
  h["h"] = stack.dom->h;
  h["N"] = stack.N;
  h["shape"] = stack.dom->shape == DomainShape::Disk ? "disk" : "square";
  h["forcing"] = forcing.constants;
  h["theta"] = forcing.theta;
  std::ofstream out(path);
  if (!out)
    throw std::invalid_argument("write_stack_header: cannot open " + path);
  out << h.dump(2) << "\n";
}

std::pair<MembraneStack, Forcing> read_stack(const std::string &header_path,
                                             const std::string &csv_path) {
  std::ifstream hin(header_path);
  if (!hin)
    throw std::invalid_argument("read_stack: cannot open " + header_path);
  nlohmann::json h = nlohmann::json::parse(hin);
  const int n = h.at("n").get<int>();
  const double R = h.at("R").get<double>();
  const int N = h.at("N").get<int>();
  const DomainShape shape = h.at("shape").get<std::string>() == "square"
                                ? DomainShape::Square
                                : DomainShape::Disk;
  Forcing forcing(h.at("forcing").get<std::vector<double>>(),
                  h.at("theta").get<double>());
  if (forcing.N() != N)
    throw std::invalid_argument("read_stack: forcing size mismatch");

  DomainPtr dom = build_domain(n, R, shape);
  MembraneStack stack(dom, N);

  std::ifstream in(csv_path);
  if (!in) throw std::invalid_argument("read_stack: cannot open " + csv_path);
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("read_stack: empty CSV");
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      if (!std::getline(in, line))
        throw std::invalid_argument("read_stack: truncated CSV");
      std::stringstream row(line);
      std::string cell;
      std::getline(row, cell, ',');  // x
      std::getline(row, cell, ',');  // y
      std::getline(row, cell, ',');
      if (class_from_name(cell) != dom->node_class(ix, iy))
        throw std::invalid_argument("read_stack: node class mismatch");
      for (int j = 0; j < N; ++j) {
        if (!std::getline(row, cell, ','))
          throw std::invalid_argument("read_stack: short CSV row");
        stack.u[j].at(ix, iy) = std::stod(cell);
      }
    }
  }
  return {std::move(stack), std::move(forcing)};
}

}  // namespace membranes
