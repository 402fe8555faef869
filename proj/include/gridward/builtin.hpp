#pragma once

#include <string_view>

#include "gridward/builtin_profiles.hpp"
#include "gridward/policy.hpp"
#include "gridward/policy_io.hpp"
#include "gridward/profiles.hpp"

namespace gridward {

namespace builtin {

// Worker-node default filter: protect server configuration and pilot
// credentials, kill the modeled escalation vectors, observe the rest.
inline constexpr std::string_view k_baseline_policy =
    R"POLICY(policy baseline
default allow
kill open if arg0 == "/etc/passwd"
deny 13 open if arg0 prefix "/etc/"
deny 13 access if arg0 prefix "/etc/"
deny 13 stat if arg0 prefix "/etc/"
deny 13 open if arg0 prefix "/pilot/credentials"
deny 13 stat if arg0 prefix "/pilot/credentials"
deny 13 access if arg0 prefix "/pilot/credentials"
kill ptrace
kill mount
kill unshare
deny 1 setuid
deny 1 setgid
log execve
log connect
)POLICY";

inline constexpr std::string_view profile_texts[] = {
    k_reco,        k_montecarlo,  k_merge,      k_credential_theft,
    k_cryptominer, k_dos_forkbomb, k_job_tamper, k_escape_privesc,
};

}  // namespace builtin

// The eight frozen builtin profiles. Same grammar as user profiles;
// data/profiles/ carries the identical text as files.
inline const ProfileCatalog& builtin_catalog() {
  static const ProfileCatalog catalog = [] {
    ProfileCatalog c;
    for (std::string_view text : builtin::profile_texts)
      c.add(parse_profile(text));
    return c;
  }();
  return catalog;
}

inline const Policy& builtin_baseline_policy() {
  static const Policy policy = parse_policy(builtin::k_baseline_policy);
  return policy;
}

}  // namespace gridward
