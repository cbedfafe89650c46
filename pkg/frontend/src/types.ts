/** Payload shapes served by the explorer service under /api/v1. */

export interface SeriesInfo {
  series_id: string;
  N: number;
  n: number;
}

export interface DecompositionInfo {
  decomposition_id: string;
  K: number;
  r: number;
  d: number;
  lambda: number[];
}

export interface SummaryPayload {
  singular_values: number[];
  percentages: number[];
  /** one right singular vector per component, each of length K */
  v: number[][];
  dominant_freqs: number[];
  render_grid: number[];
  /** [component][lag][grid point] */
  psi_curves: number[][][];
  /** [component][lag] */
  lag_norms: number[][];
}

export interface ReconstructionGroup {
  label: string;
  indices: number[];
  /** [grid point][time] — curves sampled on the original grid */
  curves: number[][];
}

export interface ReconstructionPayload {
  s: number[];
  groups: ReconstructionGroup[];
}

export interface WcorPayload {
  labels: string[];
  values: number[][];
}

export interface ApiErrorBody {
  code: string;
  message: string;
}
