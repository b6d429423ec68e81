#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "vlp/error.hpp"
#include "vlp/occ_link.hpp"
#include "vlp/protocol.hpp"
#include "vlp/rs_camera.hpp"
#include "vlp/simulation.hpp"
#include "vlp/vision.hpp"
#include "vlp/vlp_solver.hpp"

namespace py = pybind11;
using namespace vlp;

namespace {

Scenario scenario_arg(const std::optional<std::string>& json_text) {
  if (!json_text) return default_scenario();
  try {
    return scenario_from_json(nlohmann::json::parse(*json_text));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
}

const AgentState& agent_arg(const Scenario& s, const std::string& id) {
  for (const auto& a : s.agents) {
    if (a.agent_id == id) return a;
  }
  throw Error(ErrorCode::kValidation, "no agent '" + id + "' in scenario");
}

Image image_arg(const py::array_t<float, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw Error(ErrorCode::kValidation, "image must be a 2-D array");
  Image img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  std::copy(a.data(), a.data() + a.size(), img.data().begin());
  return img;
}

py::dict roi_dict(const RoiDetection& r) {
  py::dict d;
  d["centroid"] = py::make_tuple(r.centroid.u, r.centroid.v);
  d["bbox"] = py::make_tuple(r.u_min, r.v_min, r.u_max, r.v_max);
  d["equiv_diameter"] = r.equiv_diameter;
  d["pixel_count"] = r.pixel_count;
  d["modulated"] = r.modulated;
  d["touches_border"] = r.touches_border;
  return d;
}

py::dict fix_dict(const PositionFix& f) {
  py::dict d;
  d["x"] = f.position.x();
  d["y"] = f.position.y();
  d["z"] = f.position.z();
  d["yaw"] = f.yaw;
  d["scheme"] = to_string(f.scheme);
  d["residual_px"] = f.residual_px;
  d["n_leds"] = f.n_leds;
  return d;
}

LedObservation observation_arg(const py::dict& d) {
  LedObservation o;
  o.uid = d["uid"].cast<int>();
  const auto c = d["centroid"].cast<std::pair<double, double>>();
  o.centroid = {c.first, c.second};
  o.equiv_diameter_px = d.contains("equiv_diameter") ? d["equiv_diameter"].cast<double>() : 0.0;
  const auto w = d["world"].cast<std::tuple<double, double, double>>();
  o.world = {std::get<0>(w), std::get<1>(w), std::get<2>(w)};
  o.physical_diameter_m = d.contains("physical_diameter") ? d["physical_diameter"].cast<double>() : 0.0;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Rolling-shutter visible light positioning simulator";

  static py::exception<Error> vlp_error(m, "VlpError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object code = py::str(std::string(to_string(e.code())));
      PyErr_SetObject(vlp_error.ptr(), py::make_tuple(py::str(e.what()), code).ptr());
    }
  });

  m.def("default_scenario", [] { return scenario_to_json(default_scenario()).dump(); },
        "Built-in scene as a JSON string.");

  m.def("encode_uid", [](int uid) { return encode_uid(uid).to_string(); }, py::arg("uid"));

  m.def(
      "decode_chips",
      [](const std::string& chips) {
        const auto seq = ChipSequence::from_string(chips);
        const DecodeResult r = decode_chips(seq.chips);
        py::dict d;
        d["uid"] = r.uid;
        d["sync_offset"] = r.sync_offset;
        d["confidence"] = r.confidence;
        return d;
      },
      py::arg("chips"));

  m.def(
      "render",
      [](const std::string& agent_id, double t, std::optional<std::string> scenario, std::uint64_t tick) {
        const Scenario s = scenario_arg(scenario);
        const AgentState& agent = agent_arg(s, agent_id);
        const auto index = static_cast<std::uint64_t>(&agent - s.agents.data());
        const RsFrame f = render_frame(s, agent, t, NoiseStream::for_frame(s.rng_seed, index, tick));
        py::array_t<float> out({f.pixels.height(), f.pixels.width()});
        std::copy(f.pixels.data().begin(), f.pixels.data().end(), out.mutable_data());
        return out;
      },
      py::arg("agent_id"), py::arg("t") = 0.0, py::arg("scenario") = py::none(), py::arg("tick") = 0,
      "Renders one frame as a (height, width) float32 array in [0, 1].");

  m.def(
      "detect_rois",
      [](const py::array_t<float, py::array::c_style | py::array::forcecast>& image) {
        py::list out;
        for (const auto& r : detect_rois(image_arg(image))) out.append(roi_dict(r));
        return out;
      },
      py::arg("image"));

  m.def(
      "decode_image",
      [](const py::array_t<float, py::array::c_style | py::array::forcecast>& image) {
        const Image img = image_arg(image);
        py::list out;
        for (const auto& r : detect_rois(img)) {
          py::dict d = roi_dict(r);
          try {
            d["uid"] = decode_roi(extract_profile(img, r)).uid;
          } catch (const Error& e) {
            d["uid"] = py::none();
            d["error"] = std::string(to_string(e.code()));
          }
          out.append(d);
        }
        return out;
      },
      py::arg("image"), "Detects lamps and decodes each from a single frame.");

  m.def(
      "solve",
      [](const py::list& observations, std::tuple<double, double, double> attitude, bool yaw_trusted,
         std::optional<double> known_height) {
        std::vector<LedObservation> obs;
        for (const auto& o : observations) obs.push_back(observation_arg(o.cast<py::dict>()));
        const ImuReading imu{std::get<0>(attitude), std::get<1>(attitude), std::get<2>(attitude), yaw_trusted};
        return fix_dict(select_scheme(obs, imu, CameraIntrinsics{}, known_height));
      },
      py::arg("observations"), py::arg("attitude") = std::make_tuple(0.0, 0.0, 0.0), py::arg("yaw_trusted") = true,
      py::arg("known_height") = py::none(),
      "Positions a camera with default intrinsics from lamp observations.");

  m.def(
      "simulate",
      [](int ticks, std::optional<std::string> scenario) {
        Simulation sim(scenario_arg(scenario));
        std::vector<std::string> lines;
        for (int k = 0; k < ticks; ++k) {
          for (const auto& msg : sim.tick()) lines.push_back(encode_message(msg));
        }
        return lines;
      },
      py::arg("ticks"), py::arg("scenario") = py::none(), "Runs the loop headless; returns NDJSON lines.");

  m.def(
      "canonical_message", [](const std::string& line) { return encode_message(decode_message(line)); },
      py::arg("line"), "Decodes and re-encodes one protocol line.");
}
