/**
 * Fetch wrappers for the server endpoints. Error bodies arrive as
 * {code, message, detail} JSON and are rethrown as ApiError so callers
 * can dispatch on the code (a crosstab "test_not_applicable" error, for
 * instance, carries the observed-counts payload in its detail).
 */

import { encodeState, toObj } from './state.js';
import type {
  ComparePayload,
  CrosstabPayload,
  DatasetInfo,
  ErrorBody,
  FreqPayload,
  QueryResponse,
  ViewState,
} from './types.js';

export class ApiError extends Error {
  readonly code: string;
  readonly detail: unknown;

  constructor(body: ErrorBody) {
    super(body.message);
    this.name = 'ApiError';
    this.code = body.code;
    this.detail = body.detail;
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(path, init);
  const body: unknown = await resp.json().catch(() => null);
  if (!resp.ok) {
    if (body !== null && typeof body === 'object' && 'code' in body && 'message' in body) {
      throw new ApiError(body as ErrorBody);
    }
    throw new ApiError({ code: 'http_error', message: `${resp.status} ${resp.statusText}`, detail: null });
  }
  return body as T;
}

function post<T>(path: string, payload: unknown): Promise<T> {
  return request<T>(path, {
    method: 'POST',
    headers: { 'Content-Type': 'application/json' },
    body: JSON.stringify(payload),
  });
}

export async function fetchDatasets(): Promise<DatasetInfo[]> {
  const body = await request<{ datasets: DatasetInfo[] }>('/datasets');
  return body.datasets;
}

export function loadDataset(datasetId: string): Promise<DatasetInfo> {
  return post<DatasetInfo>('/load', { dataset_id: datasetId });
}

export function runQuery(state: ViewState): Promise<QueryResponse> {
  return post<QueryResponse>('/query', toObj(state));
}

export function runFreq(state: ViewState): Promise<FreqPayload> {
  return post<FreqPayload>('/freq', toObj(state));
}

export function runCrosstab(state: ViewState): Promise<CrosstabPayload> {
  return post<CrosstabPayload>('/crosstab', toObj(state));
}

export function runCompare(state: ViewState): Promise<ComparePayload> {
  return post<ComparePayload>('/compare', toObj(state));
}

/** Download URL for the current view's full (unpaginated) result set. */
export function exportUrl(state: ViewState): string {
  return '/export.tsv?state=' + encodeState(state);
}
