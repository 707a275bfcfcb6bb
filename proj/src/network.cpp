#include "snn/network.hpp"

#include <algorithm>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace snn {

Network::Network() { intern_label(""); }

std::uint32_t Network::intern_label(std::string_view label) {
  std::string key(label);
  auto it = label_index_.find(key);
  if (it != label_index_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(labels_.size());
  labels_.push_back(key);
  label_index_.emplace(std::move(key), id);
  return id;
}

NeuronId Network::add_neuron(Weight bias, Polarity pol, std::string_view label) {
  finalized_ = false;
  neurons_.push_back(Neuron{bias, pol, false, intern_label(label)});
  return static_cast<NeuronId>(neurons_.size() - 1);
}

NeuronId Network::add_input(std::string_view label) {
  NeuronId id = add_neuron(Weight(0), Polarity::Excitatory, label);
  neurons_[id].input = true;
  inputs_.push_back(id);
  return id;
}

void Network::mark_inputs(const std::vector<NeuronId>& ids) {
  for (auto id : inputs_) neurons_[id].input = false;
  inputs_ = ids;
  for (auto id : inputs_) neurons_[id].input = true;
}

void Network::add_synapse(NeuronId src, NeuronId dst, Weight w) {
  finalized_ = false;
  synapses_.push_back(Synapse{src, dst, w});
}

void Network::add_dominant(NeuronId src, NeuronId dst) {
  finalized_ = false;
  dominant_.emplace_back(src, dst);
}

std::size_t Network::auxiliary_count() const {
  return neurons_.size() - inputs_.size() - outputs_.size();
}

void Network::finalize() {
  const std::size_t n = neurons_.size();
  if (!dominant_.empty()) {
    std::vector<std::int64_t> mass(n, 0);
    for (const auto& s : synapses_)
      if (s.dst < n) mass[s.dst] += std::llabs(s.w.raw());
    for (auto [src, dst] : dominant_) {
      std::int64_t w = 4 * (mass[dst] + std::llabs(neurons_[dst].bias.raw()) + 2);
      synapses_.push_back(Synapse{src, dst, Weight::halves(-w)});
    }
    dominant_.clear();
  }

  out_off_.assign(n + 1, 0);
  in_off_.assign(n + 1, 0);
  for (const auto& s : synapses_) {
    if (s.src >= n || s.dst >= n) continue;
    ++out_off_[s.src + 1];
    ++in_off_[s.dst + 1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    out_off_[i + 1] += out_off_[i];
    in_off_[i + 1] += in_off_[i];
  }
  out_dst_.resize(out_off_[n]);
  out_w_.resize(out_off_[n]);
  in_src_.resize(in_off_[n]);
  in_w_.resize(in_off_[n]);
  std::vector<std::uint32_t> op(out_off_.begin(), out_off_.end() - 1);
  std::vector<std::uint32_t> ip(in_off_.begin(), in_off_.end() - 1);
  for (const auto& s : synapses_) {
    if (s.src >= n || s.dst >= n) continue;
    auto o = op[s.src]++;
    out_dst_[o] = s.dst;
    out_w_[o] = s.w.raw();
    auto i = ip[s.dst]++;
    in_src_[i] = s.src;
    in_w_[i] = s.w.raw();
  }
  finalized_ = true;
}

std::vector<std::string> validate(const Network& net) {
  std::vector<std::string> out;
  const std::size_t n = net.size();
  for (std::size_t k = 0; k < net.synapses().size(); ++k) {
    const auto& s = net.synapses()[k];
    if (s.src >= n || s.dst >= n) {
      out.push_back("synapse " + std::to_string(k) + " references a missing neuron");
      continue;
    }
    const auto& src = net.neuron(s.src);
    if (src.pol == Polarity::Excitatory && s.w < Weight(0))
      out.push_back("excitatory neuron " + std::to_string(s.src) + " has negative weight " +
                    s.w.str() + " to " + std::to_string(s.dst));
    if (src.pol == Polarity::Inhibitory && s.w > Weight(0))
      out.push_back("inhibitory neuron " + std::to_string(s.src) + " has positive weight " +
                    s.w.str() + " to " + std::to_string(s.dst));
    if (net.neuron(s.dst).input)
      out.push_back("input neuron " + std::to_string(s.dst) + " has an incoming synapse");
  }
  for (NeuronId id : net.inputs())
    if (id >= n || !net.neuron(id).input) out.push_back("bad input id " + std::to_string(id));
  for (NeuronId id : net.outputs())
    if (id >= n) out.push_back("bad output id " + std::to_string(id));
  return out;
}

void export_network(const Network& net, std::ostream& os) {
  os << "snn v1 " << net.builder << " n=" << net.param_n << " m=" << net.param_m << "\n";
  for (const auto& h : net.header_lines) os << h << "\n";
  for (NeuronId i = 0; i < net.size(); ++i) {
    const auto& u = net.neuron(i);
    os << "N " << i << " bias=" << u.bias.str()
       << " pol=" << (u.pol == Polarity::Excitatory ? 'E' : 'I');
    if (!net.label(i).empty()) os << ' ' << net.label(i);
    os << "\n";
  }
  for (const auto& s : net.synapses()) os << "S " << s.src << ' ' << s.dst << ' ' << s.w.str() << "\n";
  os << "IN";
  for (auto id : net.inputs()) os << ' ' << id;
  os << "\nOUT";
  for (auto id : net.outputs()) os << ' ' << id;
  os << "\n";
}

std::string export_network(const Network& net) {
  std::ostringstream os;
  export_network(net, os);
  return os.str();
}

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw std::runtime_error("line " + std::to_string(line) + ": " + msg);
}

std::uint64_t parse_kv(const std::string& tok, const std::string& key, std::size_t line) {
  if (tok.rfind(key + "=", 0) != 0) fail(line, "expected " + key + "=");
  try {
    return std::stoull(tok.substr(key.size() + 1));
  } catch (...) {
    fail(line, "bad value for " + key);
  }
}

}  // namespace

Network import_network(std::istream& is) {
  Network net;
  std::string text;
  std::size_t line = 0;
  bool header = false;
  std::vector<NeuronId> ins;
  while (std::getline(is, text)) {
    ++line;
    if (text.empty()) continue;
    std::istringstream ls(text);
    std::string tag;
    ls >> tag;
    if (!header) {
      std::string ver, n, m;
      if (tag != "snn" || !(ls >> ver >> net.builder >> n >> m) || ver != "v1")
        fail(line, "expected header 'snn v1 <builder> n=<n> m=<m>'");
      net.param_n = parse_kv(n, "n", line);
      net.param_m = parse_kv(m, "m", line);
      header = true;
    } else if (tag == "H") {
      net.header_lines.push_back(text);
    } else if (tag == "N") {
      std::uint64_t id;
      std::string b, p;
      if (!(ls >> id >> b >> p)) fail(line, "malformed neuron");
      if (id != net.size()) fail(line, "neuron ids must be consecutive");
      if (b.rfind("bias=", 0) != 0) fail(line, "expected bias=");
      auto w = Weight::parse(b.substr(5));
      if (!w) fail(line, "bad bias");
      Polarity pol;
      if (p == "pol=E")
        pol = Polarity::Excitatory;
      else if (p == "pol=I")
        pol = Polarity::Inhibitory;
      else
        fail(line, "expected pol=E or pol=I");
      std::string label;
      std::getline(ls >> std::ws, label);
      net.add_neuron(*w, pol, label);
    } else if (tag == "S") {
      std::uint64_t a, b;
      std::string w;
      if (!(ls >> a >> b >> w)) fail(line, "malformed synapse");
      auto wt = Weight::parse(w);
      if (!wt) fail(line, "bad weight");
      if (a >= net.size() || b >= net.size()) fail(line, "synapse references unknown neuron");
      net.add_synapse(static_cast<NeuronId>(a), static_cast<NeuronId>(b), *wt);
    } else if (tag == "IN") {
      std::uint64_t id;
      while (ls >> id) {
        if (id >= net.size()) fail(line, "unknown input id");
        ins.push_back(static_cast<NeuronId>(id));
      }
    } else if (tag == "OUT") {
      std::uint64_t id;
      while (ls >> id) {
        if (id >= net.size()) fail(line, "unknown output id");
        net.add_output(static_cast<NeuronId>(id));
      }
    } else {
      fail(line, "unknown record '" + tag + "'");
    }
  }
  if (!header) fail(line, "missing header");
  net.mark_inputs(ins);
  net.finalize();
  return net;
}

}  // namespace snn
