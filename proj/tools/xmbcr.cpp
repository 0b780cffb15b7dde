// xmbcr: stripe, repair, decode and verify files with the cross-coordinated
// minimum-bandwidth regenerating code.
//
// Exit codes: 0 success, 1 usage or parameter error, 2 data error.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "xmbcr/commands.hpp"
#include "xmbcr/params.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

int exit_code_for(xmbcr::Errc code) {
  using xmbcr::Errc;
  switch (code) {
    case Errc::InvalidParams:
    case Errc::TooManyFailures:
    case Errc::NoFailures:
    case Errc::UnknownDevice:
    case Errc::DuplicateDevice:
    case Errc::FieldTooSmall:
      return kExitUsage;
    default:
      return kExitData;
  }
}

struct ParamFlags {
  std::size_t n = 0, k = 0, d = 0, t = 0;

  void attach(CLI::App* cmd, bool required) {
    for (auto [name, target] : {std::pair{"--n", &n}, {"--k", &k}, {"--d", &d}, {"--t", &t}}) {
      auto* opt = cmd->add_option(name, *target, std::string("code parameter ") + (name + 2));
      if (required) opt->required();
    }
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact minimum-bandwidth coordinated regenerating code for files"};
  app.require_subcommand(1);

  // params
  auto* params_cmd = app.add_subcommand("params", "print alpha, beta, beta' and M for (n, k, d, t)");
  ParamFlags params_flags;
  std::vector<std::size_t> params_positional;
  params_flags.attach(params_cmd, false);
  params_cmd->add_option("nkdt", params_positional, "n k d t")->expected(0, 4);

  // encode
  auto* encode_cmd = app.add_subcommand("encode", "stripe a file into n share files and a manifest");
  ParamFlags encode_flags;
  std::string encode_input, encode_out;
  std::size_t block_size = xmbcr::storage::kDefaultBlockSize;
  encode_flags.attach(encode_cmd, true);
  encode_cmd->add_option("input", encode_input, "file to encode")->required();
  encode_cmd->add_option("--out", encode_out, "output directory")->required();
  encode_cmd->add_option("--block-size", block_size, "bytes per block")->check(CLI::PositiveNumber);

  // decode
  auto* decode_cmd = app.add_subcommand("decode", "rebuild the original file from any k share files");
  std::string decode_dir, decode_out;
  std::vector<std::size_t> decode_devices;
  decode_cmd->add_option("share_dir", decode_dir, "directory holding manifest.json and shares")->required();
  decode_cmd->add_option("--devices", decode_devices, "device ids to read (k of them)")->delimiter(',')->required();
  decode_cmd->add_option("--out", decode_out, "output file")->required();

  // repair
  auto* repair_cmd = app.add_subcommand("repair", "regenerate lost share files");
  std::string repair_dir;
  std::vector<std::size_t> repair_failed;
  repair_cmd->add_option("share_dir", repair_dir, "directory holding manifest.json and shares")->required();
  repair_cmd->add_option("--failed", repair_failed, "device ids to regenerate")->delimiter(',')->required();

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "cross-check stored secondary blocks");
  std::string verify_dir;
  verify_cmd->add_option("share_dir", verify_dir, "directory holding manifest.json and shares")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*params_cmd) {
      if (!params_positional.empty()) {
        if (params_positional.size() != 4) {
          std::cerr << "params takes exactly four values: n k d t\n";
          return kExitUsage;
        }
        params_flags = {params_positional[0], params_positional[1], params_positional[2], params_positional[3]};
      }
      const auto p = xmbcr::derive_params(params_flags.n, params_flags.k, params_flags.d, params_flags.t);
      std::cout << "n=" << p.n << " k=" << p.k << " d=" << p.d << " t=" << p.t << "\n"
                << "alpha=" << p.alpha << " beta=" << p.beta << " beta'=" << p.beta_prime << " M=" << p.file_blocks
                << "\n"
                << "valid\n";
      return 0;
    }

    if (*encode_cmd) {
      const auto p = xmbcr::derive_params(encode_flags.n, encode_flags.k, encode_flags.d, encode_flags.t);
      const auto m = xmbcr::commands::encode_file(encode_input, encode_out, p, block_size);
      std::cout << "encoded " << m.original_length << " bytes into " << m.stripe_count << " stripe(s) across " << m.n
                << " shares in " << encode_out << "\n"
                << "sha256 " << m.payload_checksum << "\n";
      return 0;
    }

    if (*decode_cmd) {
      const auto r = xmbcr::commands::decode_files(decode_dir, decode_devices, decode_out);
      std::cout << "decoded " << r.bytes_written << " bytes to " << decode_out << "\n"
                << "sha256 " << r.checksum << " (matches manifest)\n";
      return 0;
    }

    if (*repair_cmd) {
      const auto r = xmbcr::commands::repair_files(repair_dir, repair_failed);
      std::cout << xmbcr::commands::describe(r);
      return 0;
    }

    if (*verify_cmd) {
      const auto r = xmbcr::commands::verify_files(verify_dir);
      for (const auto& problem : r.problems) std::cout << "problem: " << problem << "\n";
      for (auto id : r.missing) std::cout << "missing: share " << id << "\n";
      for (const auto& mm : r.mismatches) {
        std::cout << "mismatch: stripe " << mm.stripe << " device " << mm.holder << " slot " << mm.slot
                  << " (image of device " << mm.owner << ")\n";
      }
      std::cout << r.slots_checked << " secondary blocks checked, " << r.mismatches.size() << " mismatched: "
                << (r.consistent() ? "consistent" : "INCONSISTENT") << "\n";
      return r.consistent() ? 0 : kExitData;
    }
  } catch (const xmbcr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
