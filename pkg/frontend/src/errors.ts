/** Error raised for any non-2xx service response. `category` carries the
 * machine-readable error class reported by the core library (e.g. "shape",
 * "parameter", "capacity", "not-found"). */
export class FheSparseError extends Error {
  readonly category: string;
  readonly status: number;

  constructor(category: string, message: string, status: number) {
    super(message);
    this.name = "FheSparseError";
    this.category = category;
    this.status = status;
  }
}
