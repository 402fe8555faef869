#pragma once

#include <string_view>

namespace gridward::builtin {

inline constexpr std::string_view k_reco = R"PROFILE(profile reco normal
len 500
init 0 0 0.6 0 0.4 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row read 0.4 0.4 0 0.2 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row write 0.5 0.3 0 0.2 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row open 0.6 0 0 0 0 0.4 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row close 0 0.2 0.5 0 0.3 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row stat 0 0 0.7 0 0 0 0 0 0.3 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row mmap 0.7 0 0 0 0 0 0.3 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row brk 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row access 0 0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
pool open arg0 /job/%JOB%/input-001.dat,/job/%JOB%/input-002.dat,/data/alice/run188221/chunk-01.root,/data/alice/run188221/chunk-02.root,/job/%JOB%/output.root
pool stat arg0 /job/%JOB%/input-001.dat,/data/alice/run188221/chunk-01.root,/data/alice/conditions.db
pool access arg0 /job/%JOB%/output.root,/data/alice/conditions.db
)PROFILE";

inline constexpr std::string_view k_montecarlo = R"PROFILE(profile montecarlo normal
len 500
init 0 0 0.5 0 0 0 0.5 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row read 0.3 0 0 0 0 0.3 0.4 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row write 0 0.4 0 0.3 0 0 0.3 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row open 0.6 0 0 0 0 0 0 0.4 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row close 0 0 0.6 0 0 0 0.4 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row mmap 0 0.6 0 0 0 0 0.4 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row brk 0 0.5 0 0 0 0.5 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row ioctl 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
pool open arg0 /job/%JOB%/mc.config,/job/%JOB%/geometry.gdml,/data/alice/sim/magfield.par,/job/%JOB%/kine-seed.dat
)PROFILE";

inline constexpr std::string_view k_merge = R"PROFILE(profile merge normal
len 500
init 0 0 0.4 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0.6
row read 0.4 0.3 0 0.3 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row write 0.25 0.5 0 0.25 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row open 0.7 0 0 0 0 0 0 0 0 0 0.3 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row close 0 0.2 0.4 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0.4
row stat 0 0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row dup 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row getdents 0 0 0.5 0 0.5 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
pool open arg0 /job/%JOB%/parts/part-01.root,/job/%JOB%/parts/part-02.root,/job/%JOB%/parts/part-03.root,/job/%JOB%/merged.root
pool stat arg0 /job/%JOB%/parts/part-01.root,/job/%JOB%/parts/part-02.root,/data/alice/merge-manifest.txt
pool getdents arg0 /job/%JOB%/parts
)PROFILE";

inline constexpr std::string_view k_credential_theft = R"PROFILE(profile credential-theft attack
len 500
init 0 0 0 0 0.5 0 0 0 0.5 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row read 0.3 0 0 0.7 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row open 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row close 0 0 0 0 0.3 0 0 0 0.3 0 0 0.4 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row stat 0 0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row access 0 0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row socket 0 0 0 0 0 0 0 0 0 0 0 0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row connect 0 0 0 0 0 0 0 0 0 0 0 0 0 0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row send 0 0 0 0.3 0 0 0 0 0.3 0 0 0 0 0 0.4 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
pool open arg0 /pilot/credentials/x509_proxy,/pilot/credentials/x509,/etc/passwd,/pilot/credentials/token.jwt,/etc/shadow
pool stat arg0 /pilot/credentials,/etc/passwd
pool access arg0 /pilot/credentials/x509_proxy,/etc/shadow
pool connect arg0 198.51.100.23:443,exfil.example.net:8443
)PROFILE";

inline constexpr std::string_view k_cryptominer = R"PROFILE(profile cryptominer attack
len 500
init 0 0 0.4 0 0 0.3 0 0 0 0 0 0.3 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row open 0 0 0 0 0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row mmap 0 0 0 0 0 0 0 0 0 0 0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row brk 0 0 0 0 0 0 0 0 0 0 0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row socket 0 0 0 0 0 0 0 0 0 0 0 0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row connect 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0.6 0.4 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row send 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0.3 0.7 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row recv 0 0 0 0 0 0 0.15 0 0 0 0 0 0.15 0 0.4 0.3 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
pool open arg0 /job/%JOB%/xmrig,/job/%JOB%/config.json
pool connect arg0 stratum+tcp://pool.minexmr.to:4444,stratum+tcp://xmr.pool.gntl.uk:10009,pool.supportxmr.com:3333
)PROFILE";

inline constexpr std::string_view k_dos_forkbomb = R"PROFILE(profile dos-forkbomb attack
len 500
init 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0.4 0.6 0 0 0 0 0 0 0 0 0 0 0 0
row fork 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 1 0 0 0 0 0 0 0 0 0 0 0 0
row clone 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0.15 0.55 0 0 0.15 0.15 0 0 0 0 0 0 0 0
row exit 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 1 0 0 0 0 0 0 0 0 0 0 0 0
row wait 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 1 0 0 0 0 0 0 0 0 0 0 0 0
row kill 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0.8 0 0.2 0 0 0 0 0 0 0 0 0 0
)PROFILE";

inline constexpr std::string_view k_job_tamper = R"PROFILE(profile job-tamper attack
len 500
init 0 0 0 0 0.3 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0.7
row read 0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row write 0 0.3 0 0.3 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0.4 0 0 0 0
row open 0.3 0.5 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0.2 0 0 0 0
row close 0 0 0.4 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0.6
row stat 0 0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row chmod 0 0 0 0.5 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0.5 0 0 0
row chown 0 0 0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row getdents 0 0 0.6 0 0.4 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
pool open arg0 /job/victim-a113/output.root,/job/victim-a113/jobscript.sh,/job/victim-77e0/payload.bin,/job/victim-77e0/.alien_token
pool stat arg0 /job/victim-a113/jobscript.sh,/job/victim-77e0/payload.bin
pool chmod arg0 /job/victim-a113/jobscript.sh,/job/victim-77e0/payload.bin
pool chown arg0 /job/victim-a113/output.root,/job/victim-77e0/.alien_token
pool getdents arg0 /job/victim-a113,/job/victim-77e0
)PROFILE";

inline constexpr std::string_view k_escape_privesc = R"PROFILE(profile escape-privesc attack
len 500
init 0 0 0.5 0 0 0 0 0 0.5 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row read 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0.4 0 0 0 0.6 0 0 0 0 0 0 0
row open 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
row access 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 1 0 0 0 0 0 0 0
row execve 0 0 0 0 0 0 0 0 0.5 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0.5 0 0 0 0 0 0 0
row ptrace 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0.4 0 0 0 0.3 0.3 0
row setuid 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0.4 0 0 0 0 0 0.6 0 0 0 0 0
row setgid 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 1 0 0 0 0 0 0 0 0 0 0 0
row mount 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0.6 0 0 0 0 0.4 0 0 0 0 0 0
row unshare 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0.5 0 0 0 0 0 0 0 0 0.5 0 0
pool open arg0 /etc/passwd,/proc/self/exe,/etc/sudoers
pool access arg0 /etc/shadow,/proc/self/mem
pool execve arg0 /usr/bin/sudo,/job/%JOB%/pwn.sh,/usr/bin/nsenter
pool mount arg0 /proc/sys/kernel,/sys/fs/cgroup
)PROFILE";

}  // namespace gridward::builtin
