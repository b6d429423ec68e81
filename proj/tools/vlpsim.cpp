// vlpsim: command-line front end for the simulator.
//
// Exit codes: 0 success, 1 usage, 2 domain failure, 3 I/O.

#include <CLI11.hpp>
#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "vlp/error.hpp"
#include "vlp/occ_link.hpp"
#include "vlp/protocol.hpp"
#include "vlp/rs_camera.hpp"
#include "vlp/scene.hpp"
#include "vlp/server.hpp"
#include "vlp/simulation.hpp"
#include "vlp/vision.hpp"

namespace {

using namespace vlp;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDomain = 2;
constexpr int kExitIo = 3;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo:
    case ErrorCode::kParse:
    case ErrorCode::kBind:
      return kExitIo;
    case ErrorCode::kValidation:
      return kExitUsage;
    default:
      return kExitDomain;
  }
}

struct Common {
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
};

Scenario load(const Common& c) {
  Scenario s = c.scenario_path.empty() ? default_scenario() : load_scenario(c.scenario_path);
  if (c.seed) s.rng_seed = *c.seed;
  validate(s);
  return s;
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--scenario", c.scenario_path, "Scenario JSON (default: built-in scene)");
  cmd->add_option("--seed", c.seed, "RNG seed (default 42)");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  return out;
}

const AgentState& find_agent(const Scenario& s, const std::string& id) {
  for (const auto& a : s.agents) {
    if (a.agent_id == id) return a;
  }
  throw Error(ErrorCode::kValidation, "no agent '" + id + "' in scenario");
}

int run_simulate(const Common& c, std::int64_t ticks, const std::string& out_path, const std::string& messages_path) {
  Simulation sim(load(c));
  std::ofstream csv = open_out(out_path);
  std::optional<std::ofstream> stream;
  if (!messages_path.empty()) stream = open_out(messages_path);
  write_metrics_header(csv);
  for (std::int64_t k = 0; k < ticks; ++k) {
    const auto messages = sim.tick();
    for (const auto& row : sim.last_metrics()) write_metrics_row(csv, row);
    if (stream) {
      for (const auto& m : messages) *stream << encode_message(m);
    }
  }
  if (!csv) throw Error(ErrorCode::kIo, "short write to " + out_path);
  return kExitOk;
}

int run_eval(const Common& c, std::int64_t ticks, const std::string& agent_id, bool strict) {
  Simulation sim(load(c));
  if (!agent_id.empty()) find_agent(sim.scenario(), agent_id);
  std::cout << "timestamp,agent_id,truth_x,truth_y,truth_z,fix_x,fix_y,fix_z,scheme,residual_px,n_leds\n";
  std::cout.precision(9);
  int failures = 0;
  for (std::int64_t k = 0; k < ticks; ++k) {
    sim.tick();
    for (const auto& row : sim.last_metrics()) {
      if (!agent_id.empty() && row.agent_id != agent_id) continue;
      std::cout << row.t_ms / 1000.0 << ',' << row.agent_id << ',' << row.truth.x() << ',' << row.truth.y() << ','
                << row.truth.z() << ',';
      if (row.fix) {
        const auto& f = *row.fix;
        std::cout << f.position.x() << ',' << f.position.y() << ',' << f.position.z() << ',' << to_string(f.scheme)
                  << ',' << f.residual_px << ',' << f.n_leds << '\n';
      } else {
        std::cout << ",,,NoFix,,0\n";
        ++failures;
      }
    }
  }
  if (failures > 0) std::cerr << failures << " frame(s) without a fix\n";
  return strict && failures > 0 ? kExitDomain : kExitOk;
}

int run_render(const Common& c, const std::string& agent_id, double t, const std::string& out_path) {
  const Scenario s = load(c);
  std::size_t index = 0;
  while (index < s.agents.size() && s.agents[index].agent_id != agent_id) ++index;
  if (index == s.agents.size()) throw Error(ErrorCode::kValidation, "no agent '" + agent_id + "' in scenario");
  const auto tick = static_cast<std::uint64_t>(std::llround(t * s.frame_rate_hz));
  const RsFrame frame = render_frame(s, s.agents[index], t, NoiseStream::for_frame(s.rng_seed, index, tick));
  write_pgm(frame.pixels, out_path);
  return kExitOk;
}

int run_decode_chips(const std::string& text) {
  ChipSequence chips;
  try {
    chips = ChipSequence::from_string(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::kValidation, e.detail());
  }
  const DecodeResult r = decode_chips(chips.chips);
  std::cout << "uid " << r.uid << " sync_offset " << r.sync_offset << " confidence " << r.confidence << '\n';
  return kExitOk;
}

int run_decode_image(const std::string& path) {
  const Image image = read_pgm(path);
  const auto rois = detect_rois(image);
  if (rois.empty()) {
    std::cerr << "decode: no lamp found in " << path << '\n';
    return kExitDomain;
  }
  int decoded = 0;
  for (const auto& roi : rois) {
    std::cout << "roi centroid " << roi.centroid.u << ',' << roi.centroid.v << " rows " << roi.bbox_height() << ": ";
    try {
      const DecodeResult r = decode_roi(extract_profile(image, roi));
      std::cout << "uid " << r.uid << " confidence " << r.confidence << '\n';
      ++decoded;
    } catch (const DecodeError& e) {
      std::cout << "failed\n";
      std::cerr << "decode: " << e.what() << " (chips seen " << e.chips_seen() << ")\n";
    }
  }
  return decoded > 0 ? kExitOk : kExitDomain;
}

int run_serve(const Common& c, const std::string& bind, const std::string& http_bind, bool headless,
              const std::string& static_dir, double speed, std::int64_t max_ticks) {
  ServerOptions opts;
  opts.tcp = parse_endpoint(bind);
  if (http_bind.empty()) {
    opts.http = opts.tcp;
    opts.http.port = opts.tcp.port == 0 ? 0 : static_cast<std::uint16_t>(opts.tcp.port + 1);
  } else {
    opts.http = parse_endpoint(http_bind);
  }
  opts.headless = headless;
  opts.static_dir = static_dir;
  opts.speed = speed;
  opts.max_ticks = max_ticks;

  Server server(load(c), opts);
  server.start();
  std::signal(SIGINT, [](int) { std::_Exit(0); });
  std::signal(SIGTERM, [](int) { std::_Exit(0); });
  std::cerr << "tcp " << opts.tcp.host << ':' << server.tcp_port() << ", http/ws " << opts.http.host << ':'
            << server.http_port() << (headless ? " (headless)" : "") << '\n';
  server.wait();
  server.stop();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rolling-shutter visible light positioning simulator"};
  app.require_subcommand(1);

  Common common;
  std::int64_t ticks = 300;
  std::string out_path = "metrics.csv";
  std::string messages_path;
  std::string agent_id;
  bool strict = false;
  double t = 0.0;
  std::string chips_text;
  std::string image_path;
  int uid = 0;
  std::string bind = "127.0.0.1:7700";
  std::string http_bind;
  bool headless = false;
  std::string static_dir;
  double speed = 1.0;
  std::int64_t max_ticks = 0;

  auto* simulate = app.add_subcommand("simulate", "Run offline and write metrics.csv");
  add_common(simulate, common);
  simulate->add_option("--ticks", ticks, "Frames to simulate")->check(CLI::NonNegativeNumber);
  simulate->add_option("--out", out_path, "Metrics CSV path");
  simulate->add_option("--messages", messages_path, "Also write the message stream (NDJSON)");

  auto* eval = app.add_subcommand("eval", "Per-frame positioning CSV on standard output");
  add_common(eval, common);
  eval->add_option("--ticks", ticks, "Frames to evaluate")->check(CLI::NonNegativeNumber);
  eval->add_option("--agent", agent_id, "Only this agent");
  eval->add_flag("--strict", strict, "Exit 2 if any frame has no fix");

  auto* render = app.add_subcommand("render", "Render one agent's frame to a PGM");
  add_common(render, common);
  render->add_option("--agent", agent_id, "Agent id")->required();
  render->add_option("--t", t, "Exposure start of row 0, seconds");
  render->add_option("--out", out_path, "PGM path")->required();

  auto* decode = app.add_subcommand("decode", "Decode a chip string or a PGM frame");
  auto* chips_opt = decode->add_option("--chips", chips_text, "Chip string of 0/1 characters");
  auto* image_opt = decode->add_option("--image", image_path, "PGM frame");
  chips_opt->excludes(image_opt);
  decode->require_option(1);

  auto* encode = app.add_subcommand("encode", "Print the 21-chip frame of a uid");
  encode->add_option("--uid", uid, "UID 0-255")->required()->check(CLI::Range(0, 255));

  auto* serve = app.add_subcommand("serve", "Run the live service");
  add_common(serve, common);
  serve->add_option("--bind", bind, "TCP NDJSON endpoint host:port");
  serve->add_option("--http-bind", http_bind, "HTTP/WebSocket endpoint (default: TCP port + 1)");
  serve->add_flag("--headless", headless, "Do not serve the console page");
  serve->add_option("--static-dir", static_dir, "Directory served at /");
  serve->add_option("--speed", speed, "Time scale; 0 runs unpaced");
  serve->add_option("--max-ticks", max_ticks, "Stop after this many ticks (0: run forever)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*simulate) return run_simulate(common, ticks, out_path, messages_path);
    if (*eval) return run_eval(common, ticks, agent_id, strict);
    if (*render) return run_render(common, agent_id, t, out_path);
    if (*decode) return chips_text.empty() ? run_decode_image(image_path) : run_decode_chips(chips_text);
    if (*encode) {
      std::cout << encode_uid(uid).to_string() << '\n';
      return kExitOk;
    }
    if (*serve) return run_serve(common, bind, http_bind, headless, static_dir, speed, max_ticks);
  } catch (const DecodeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitUsage;
}
