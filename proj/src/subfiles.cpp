#include "hiercache/subfiles.hpp"

#include "hiercache/errors.hpp"

namespace hiercache {

std::string format_subfile(const SubfileId& id) {
  return std::to_string(id.file) + ":" + format_set(id.relay_set) + ":" +
         format_set(id.user_set);
}

std::vector<SubfileId> enumerate_subfile_classes(const NetworkConfig& cfg, int file) {
  if (file < 1 || file > cfg.n_files)
    throw DomainError("enumerate_subfile_classes: file id out of range");
  std::vector<SubfileId> out;
  auto qs = subsets_lex(full_mask(cfg.k1));
  auto ss = subsets_lex(full_mask(cfg.users()));
  out.reserve(qs.size() * ss.size());
  for (Mask q : qs)
    for (Mask s : ss) out.push_back(SubfileId{file, q, s});
  return out;
}

}  // namespace hiercache
