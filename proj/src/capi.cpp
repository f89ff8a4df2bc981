#include "subsample.h"

#include <memory>
#include <string>

#include "subsample/run_io.hpp"

using namespace subsample;

struct ss_job {
  RunConfig config;
  bool has_config = false;
  JobResult result;
  std::string error;
};

namespace {

thread_local std::string t_last_error;

ss_status code_of(const Error& e) {
  switch (e.code()) {
    case ErrorCode::config: return SS_ERROR_CONFIG;
    case ErrorCode::selection: return SS_ERROR_SELECTION;
    case ErrorCode::certification: return SS_ERROR_CERTIFICATION;
    case ErrorCode::internal: return SS_ERROR_INTERNAL;
  }
  return SS_ERROR_INTERNAL;
}

template <typename Fn>
ss_status guarded(ss_job* job, Fn&& fn) {
  if (job == nullptr) return SS_ERROR_INVALID;
  job->error.clear();
  t_last_error.clear();
  try {
    return fn();
  } catch (const Error& e) {
    job->error = t_last_error = e.what();
    return code_of(e);
  } catch (const std::exception& e) {
    job->error = t_last_error = e.what();
    return SS_ERROR_INTERNAL;
  } catch (...) {
    job->error = t_last_error = "unknown failure";
    return SS_ERROR_INTERNAL;
  }
}

}  // namespace

extern "C" {

ss_job* ss_job_create(const char* config_json, ss_status* status) {
  auto job = std::make_unique<ss_job>();
  if (config_json == nullptr) {
    if (status) *status = SS_ERROR_INVALID;
    return nullptr;
  }
  const ss_status st = guarded(job.get(), [&]() {
    job->config = parse_run_config(config_json);
    job->has_config = true;
    return SS_OK;
  });
  if (status) *status = st;
  if (st != SS_OK) return nullptr;
  return job.release();
}

ss_job* ss_job_create_empty(void) { return new ss_job(); }

void ss_job_free(ss_job* job) { delete job; }

const char* ss_job_error(const ss_job* job) {
  return job ? job->error.c_str() : "null job";
}

const char* ss_last_error(void) { return t_last_error.c_str(); }

ss_status ss_job_override_seed(ss_job* job, uint64_t seed) {
  return guarded(job, [&]() {
    if (!job->has_config) return SS_ERROR_INVALID;
    job->config.seed = seed;
    job->config.selection.rng_seed = seed;
    return SS_OK;
  });
}

ss_status ss_job_set_threads(ss_job* job, int threads) {
  return guarded(job, [&]() {
    if (!job->has_config || threads < 1) return SS_ERROR_INVALID;
    job->config.selection.threads = threads;
    return SS_OK;
  });
}

ss_status ss_job_sparsify(ss_job* job) {
  return guarded(job, [&]() {
    if (!job->has_config) return SS_ERROR_INVALID;
    job->result = cmd_sparsify(job->config);
    if (!job->result.certified) {
      job->error = "certified frame bounds missed their targets";
      return SS_ERROR_CERTIFICATION;
    }
    return SS_OK;
  });
}

ss_status ss_job_grid(ss_job* job, int resolution, int iteration) {
  return guarded(job, [&]() {
    if (!job->has_config) return SS_ERROR_INVALID;
    job->result = cmd_grid(job->config, resolution, iteration);
    if (!job->result.certified) {
      job->error = "certified frame bounds missed their targets";
      return SS_ERROR_CERTIFICATION;
    }
    return SS_OK;
  });
}

ss_status ss_job_recover(ss_job* job, const char* target_json) {
  return guarded(job, [&]() {
    if (!job->has_config || target_json == nullptr) return SS_ERROR_INVALID;
    const TargetSpec spec = parse_target_spec(target_json);
    job->result = cmd_recover(job->config, spec);
    if (!job->result.certified) {
      job->error = "measured recovery error exceeded its certificate";
      return SS_ERROR_CERTIFICATION;
    }
    return SS_OK;
  });
}

ss_status ss_job_verify(ss_job* job, uint64_t seed) {
  return guarded(job, [&]() {
    job->result = cmd_verify(seed);
    if (!job->result.certified) {
      job->error = "oracle battery reported a failure";
      return SS_ERROR_CERTIFICATION;
    }
    return SS_OK;
  });
}

int ss_job_output_count(const ss_job* job) {
  return job ? static_cast<int>(job->result.outputs.size()) : 0;
}

const char* ss_job_output_name(const ss_job* job, int index) {
  if (!job || index < 0 ||
      index >= static_cast<int>(job->result.outputs.size())) {
    return nullptr;
  }
  return job->result.outputs[static_cast<std::size_t>(index)].name.c_str();
}

const char* ss_job_output_data(const ss_job* job, int index) {
  if (!job || index < 0 ||
      index >= static_cast<int>(job->result.outputs.size())) {
    return nullptr;
  }
  return job->result.outputs[static_cast<std::size_t>(index)].data.c_str();
}

unsigned ss_version(void) { return 10000; }

}  // extern "C"
